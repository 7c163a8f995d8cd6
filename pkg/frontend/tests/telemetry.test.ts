import { describe, expect, it } from "vitest";

import { DisplayState, TelemetryBuffer } from "../src/telemetry.js";
import type { StepRecord, TelemetryMessage } from "../src/types.js";

function msg(seq: number, t: number): TelemetryMessage {
  return {
    type: "telemetry",
    session_id: "s1",
    seq,
    payload: { t_s: t, tiles_remaining: 100 } as unknown as StepRecord,
  };
}

describe("TelemetryBuffer", () => {
  it("keeps a bounded ring", () => {
    const buf = new TelemetryBuffer(4);
    for (let i = 0; i < 10; i++) buf.push(msg(i, i * 0.005));
    expect(buf.size).toBe(4);
    expect(buf.latest()?.seq).toBe(9);
  });

  it("drops stale sequence numbers so the timeline never reorders", () => {
    const buf = new TelemetryBuffer();
    buf.push(msg(0, 0));
    buf.push(msg(3, 0.015)); // decimated stream: gaps are fine
    expect(buf.push(msg(2, 0.01))).toBe(false);
    expect(buf.dropped).toBe(1);
    const times = buf.timeline();
    expect(times).toEqual([...times].sort((a, b) => a - b));
  });

  it("decimated gaps preserve order", () => {
    const buf = new TelemetryBuffer();
    for (const s of [0, 2, 4, 9, 11]) buf.push(msg(s, s * 0.005));
    expect(buf.timeline()).toEqual([0, 0.01, 0.02, 0.045, 0.055]);
  });
});

describe("DisplayState", () => {
  it("applies records only at frame boundaries", () => {
    const buf = new TelemetryBuffer();
    const disp = new DisplayState(buf);
    buf.push(msg(0, 0));
    buf.push(msg(1, 0.005));
    expect(disp.current).toBeNull();
    expect(disp.applyFrame()).toBe(true);
    expect(disp.current?.t_s).toBe(0.005);
    // no new record: the frame applies nothing
    expect(disp.applyFrame()).toBe(false);
    expect(disp.framesApplied).toBe(1);
  });

  it("displayed pose equals the last server record verbatim", () => {
    const buf = new TelemetryBuffer();
    const disp = new DisplayState(buf);
    const record = {
      t_s: 0.01,
      resolved_interface_m: [0.0, 0.49, 0.93],
      tiles_remaining: 97,
    } as unknown as StepRecord;
    buf.push({ type: "telemetry", session_id: "s1", seq: 2, payload: record });
    disp.applyFrame();
    expect(disp.current).toBe(record);
  });
});
