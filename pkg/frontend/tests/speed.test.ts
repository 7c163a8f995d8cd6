// Plane-height animation: the displayed plane moves exactly as fast as the
// telemetry says it does, within one frame of quantization.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { DisplayState, TelemetryBuffer } from "../src/telemetry.js";
import type { TelemetryMessage } from "../src/types.js";
import type { Transcript } from "./fakes.js";

const here = dirname(fileURLToPath(import.meta.url));
const FIXTURE = JSON.parse(
  readFileSync(join(here, "fixtures", "session_transcript.json"), "utf-8")
) as Transcript;

function renderedHeight(proxyHeight: number): number {
  return FIXTURE.base_z_m + (proxyHeight - FIXTURE.base_z_m) / FIXTURE.alpha;
}

describe("plane slider animation speed", () => {
  it("matches the telemetry-reported rendered speed within one frame", () => {
    const telemetry = FIXTURE.outbound.filter(
      (m) => m.type === "telemetry"
    ) as TelemetryMessage[];
    const buf = new TelemetryBuffer(4096);
    const disp = new DisplayState(buf);
    // frame loop: one telemetry record arrives per frame (run stream),
    // frame dt equals the sim step dt
    let prevShown: number | null = null;
    let prevT: number | null = null;
    let movingFrames = 0;
    for (const msg of telemetry) {
      buf.push(msg);
      if (!disp.applyFrame()) continue;
      const rec = disp.current!;
      const shown = renderedHeight(rec.actuator.height_m);
      if (prevShown !== null && prevT !== null && rec.t_s > prevT) {
        const animationSpeed = (shown - prevShown) / (rec.t_s - prevT);
        const reportedRenderedSpeed = rec.actuator.command_speed_mps / FIXTURE.alpha;
        // one frame of quantization: the displayed height lags the command
        // by at most a single step of the reported speed
        const quantum =
          (Math.abs(reportedRenderedSpeed) * FIXTURE.dt_s) / (rec.t_s - prevT);
        expect(Math.abs(animationSpeed - reportedRenderedSpeed)).toBeLessThanOrEqual(
          Math.abs(reportedRenderedSpeed) * 1e-6 + quantum * FIXTURE.dt_s + 1e-9
        );
        if (Math.abs(animationSpeed) > 1e-9) movingFrames += 1;
      }
      prevShown = shown;
      prevT = rec.t_s;
    }
    // the setpoint change really animated the plane
    expect(movingFrames).toBeGreaterThan(50);
  });

  it("animates at the rendered maximum while the command is saturated", () => {
    const telemetry = FIXTURE.outbound.filter(
      (m) => m.type === "telemetry"
    ) as TelemetryMessage[];
    const records = telemetry.map((m) => m.payload);
    const saturated = records.filter(
      (r) => Math.abs(r.actuator.command_speed_mps - 0.016) < 1e-12
    );
    expect(saturated.length).toBeGreaterThan(10);
    // consecutive saturated records climb at 7.41 cm/s rendered
    for (let i = 1; i < telemetry.length; i++) {
      const a = telemetry[i - 1].payload;
      const b = telemetry[i].payload;
      if (
        Math.abs(a.actuator.command_speed_mps - 0.016) < 1e-12 &&
        Math.abs(b.actuator.command_speed_mps - 0.016) < 1e-12 &&
        b.t_s > a.t_s
      ) {
        const rate =
          (renderedHeight(b.actuator.height_m) - renderedHeight(a.actuator.height_m)) /
          (b.t_s - a.t_s);
        expect(rate).toBeCloseTo(0.016 / FIXTURE.alpha, 6);
      }
    }
  });
});
