// Workbench entry point: canvas renderer, controls, and service connection.
//
// Server-authoritative: every drawn pose comes from the last applied
// telemetry record. The render loop can be disabled from the UI without
// changing anything the server computes or sends.

import { OrbitCamera } from "./camera.js";
import { DragController } from "./drag.js";
import { SimClient } from "./protocol.js";
import { DisplayState, TelemetryBuffer } from "./telemetry.js";
import { forceGain, scaleDown, shellOutline } from "./shell.js";
import type { GeometryParams, SocketLike, StepRecord, Vec3 } from "./types.js";

// mirrors the bundled 0.93 m study bundle so geometry edits can re-create
// sessions without a file round trip
const DEFAULT_GEOMETRY: GeometryParams = {
  format_version: 1,
  alpha: 0.216,
  l1_m: 0.5180353622383772,
  l2_m: 0.22530726457563063,
  azimuth_limit_deg: 135.0,
  elevation_min_deg: -14.313106980910337,
  elevation_max_deg: 14.313106980910337,
  elbow_min_deg: 30.0,
  elbow_max_deg: 150.0,
  base_position_m: [0.0, 0.0, 1.0],
};

const DEFAULT_SCENE = {
  format_version: 1,
  table: {
    center_m: [0.0, 0.49, 0.93],
    size_x_m: 0.6,
    size_y_m: 0.3,
    height_m: 0.93,
  },
  tiles: { rows: 10, cols: 10 },
  actuator: { kp_per_s: 2.0, v_up_mps: 0.016, v_down_mps: 0.02 },
};

function el<T extends HTMLElement>(id: string): T {
  const e = document.getElementById(id);
  if (!e) throw new Error(`missing element #${id}`);
  return e as T;
}

function wsUrl(): string {
  const q = new URLSearchParams(window.location.search);
  const host = q.get("host") ?? window.location.hostname ?? "127.0.0.1";
  const port = q.get("port") ?? "8089";
  return `ws://${host || "127.0.0.1"}:${port}/ws`;
}

class Workbench {
  private canvas: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D;
  private camera = new OrbitCamera();
  private buffer = new TelemetryBuffer(1024);
  private display = new DisplayState(this.buffer);
  private client: SimClient;
  private drag: DragController;
  private geometry: GeometryParams = { ...DEFAULT_GEOMETRY };
  private renderEnabled = true;
  private running = false;
  private runTimer: number | null = null;
  private dragging = false;
  private orbiting = false;
  private lastPointer: [number, number] = [0, 0];
  private contactTrail: Vec3[] = [];

  constructor(socket: SocketLike) {
    this.canvas = el<HTMLCanvasElement>("view");
    const ctx = this.canvas.getContext("2d");
    if (!ctx) throw new Error("no 2d context");
    this.ctx = ctx;
    this.client = new SimClient(socket);
    this.drag = new DragController(this.client, this.camera);
    this.client.onTelemetry = (msg) => {
      this.buffer.push(msg);
      const rec = msg.payload;
      if (rec.contact.in_contact) {
        this.contactTrail.push([...rec.resolved_interface_m] as Vec3);
        if (this.contactTrail.length > 4000) this.contactTrail.shift();
      }
      el<HTMLSpanElement>("status").textContent =
        `session ${msg.session_id} | t=${rec.t_s.toFixed(2)} s | ` +
        `tiles ${rec.tiles_remaining}/100`;
    };
    this.client.onError = (code, detail) => {
      el<HTMLSpanElement>("status").textContent = `error ${code}: ${detail}`;
    };
    this.wireControls();
    socket.onopen = () => {
      this.client.hello();
      this.recreateSession();
    };
    requestAnimationFrame(() => this.frame());
  }

  private recreateSession(): void {
    this.buffer.clear();
    this.contactTrail = [];
    this.client.createSession({
      scene: DEFAULT_SCENE,
      geometry: this.geometry as unknown as Record<string, unknown>,
    });
  }

  private wireControls(): void {
    const slider = el<HTMLInputElement>("plane-height");
    slider.addEventListener("input", () => {
      this.client.setPlaneSetpoint(parseFloat(slider.value));
      el<HTMLSpanElement>("plane-height-value").textContent =
        `${parseFloat(slider.value).toFixed(2)} m`;
    });
    el<HTMLButtonElement>("btn-start").addEventListener("click", () => {
      this.running = true;
      this.pump();
    });
    el<HTMLButtonElement>("btn-pause").addEventListener("click", () => {
      this.running = false;
      if (this.runTimer !== null) window.clearTimeout(this.runTimer);
    });
    el<HTMLButtonElement>("btn-reset").addEventListener("click", () => {
      this.running = false;
      this.recreateSession();
    });
    el<HTMLInputElement>("render-enabled").addEventListener("change", (ev) => {
      this.renderEnabled = (ev.target as HTMLInputElement).checked;
    });
    for (const field of ["alpha", "l1_m", "l2_m", "azimuth_limit_deg"]) {
      const input = el<HTMLInputElement>(`geom-${field}`);
      input.value = String(this.geometry[field as keyof GeometryParams]);
      input.addEventListener("change", () => {
        const v = parseFloat(input.value);
        if (Number.isFinite(v)) {
          (this.geometry as unknown as Record<string, number>)[field] = v;
          this.recreateSession();
        }
      });
    }
    this.canvas.addEventListener("pointerdown", (ev) => {
      this.lastPointer = [ev.offsetX, ev.offsetY];
      if (ev.shiftKey) {
        this.orbiting = true;
      } else {
        this.dragging = true;
        const rec = this.display.current;
        const start = rec ? rec.resolved_interface_m : [0.3, 0.3, 1.0];
        this.drag.beginAt(start as Vec3);
      }
      this.canvas.setPointerCapture(ev.pointerId);
    });
    this.canvas.addEventListener("pointermove", (ev) => {
      const dx = ev.offsetX - this.lastPointer[0];
      const dy = ev.offsetY - this.lastPointer[1];
      this.lastPointer = [ev.offsetX, ev.offsetY];
      if (this.orbiting) {
        this.camera.yaw -= dx * 0.01;
        this.camera.pitch = Math.min(
          1.4,
          Math.max(-1.4, this.camera.pitch + dy * 0.01)
        );
      } else if (this.dragging) {
        this.drag.moveBy(dx, dy, this.screen(), performance.now());
        this.client.step();
      }
    });
    this.canvas.addEventListener("pointerup", () => {
      this.dragging = false;
      this.orbiting = false;
      this.drag.end();
    });
    this.canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      this.camera.span = Math.min(6, Math.max(0.5, this.camera.span * (1 + ev.deltaY * 1e-3)));
    });
  }

  /** drive the session at ~real time while "running" */
  private pump(): void {
    if (!this.running) return;
    this.drag.tick(performance.now());
    this.client.run(10, 2);
    this.runTimer = window.setTimeout(() => this.pump(), 50);
  }

  private screen() {
    return { width: this.canvas.width, height: this.canvas.height };
  }

  private frame(): void {
    if (this.renderEnabled) {
      this.display.applyFrame();
      this.draw();
    }
    requestAnimationFrame(() => this.frame());
  }

  private line(points: Vec3[], color: string, width = 1): void {
    const s = this.screen();
    this.ctx.strokeStyle = color;
    this.ctx.lineWidth = width;
    this.ctx.beginPath();
    points.forEach((p, i) => {
      const q = this.camera.project(p, s);
      if (i === 0) this.ctx.moveTo(q.x, q.y);
      else this.ctx.lineTo(q.x, q.y);
    });
    this.ctx.stroke();
  }

  private dot(p: Vec3, color: string, r = 4): void {
    const q = this.camera.project(p, this.screen());
    this.ctx.fillStyle = color;
    this.ctx.beginPath();
    this.ctx.arc(q.x, q.y, r, 0, 2 * Math.PI);
    this.ctx.fill();
  }

  private draw(): void {
    const s = this.screen();
    this.ctx.fillStyle = "#10141c";
    this.ctx.fillRect(0, 0, s.width, s.height);
    for (const lineSeg of shellOutline(this.geometry).lines) {
      this.line(lineSeg, "#2a3550");
    }
    this.drawTable();
    const rec = this.display.current;
    if (rec) {
      this.drawPlanes(rec);
      this.drawLinkage(rec);
      this.drawGauges(rec);
    }
    if (this.contactTrail.length > 1) {
      this.line(this.contactTrail, "#46b4ff", 2);
    }
  }

  private tableCorners(z: number): Vec3[] {
    const t = DEFAULT_SCENE.table;
    const [cx, cy] = t.center_m;
    const hx = t.size_x_m / 2;
    const hy = t.size_y_m / 2;
    return [
      [cx - hx, cy - hy, z],
      [cx + hx, cy - hy, z],
      [cx + hx, cy + hy, z],
      [cx - hx, cy + hy, z],
      [cx - hx, cy - hy, z],
    ];
  }

  private drawTable(): void {
    this.line(this.tableCorners(DEFAULT_SCENE.table.height_m), "#5a6c49", 2);
  }

  private drawPlanes(rec: StepRecord): void {
    // proxy plane at the actuator height, rendered plane at its scale-up
    const g = this.geometry;
    const hProxy = rec.actuator.height_m;
    const hRendered = g.base_position_m[2] + (hProxy - g.base_position_m[2]) / g.alpha;
    const proxyCorners = this.tableCorners(hProxy).map((p) =>
      scaleDown(g, [p[0], p[1], hProxy])
    );
    this.line(proxyCorners as Vec3[], "#7a5fa0", 2);
    this.line(this.tableCorners(hRendered), "#9a8fd0", 1);
  }

  private drawLinkage(rec: StepRecord): void {
    const bars = rec.bar_points_m;
    if (!bars) return;
    this.line([bars.O, bars.A, bars.E], "#e0e4ee", 3);
    this.line([bars.B, bars.D], "#8fd09a", 2);
    this.line([bars.L, bars.B], "#8fd09a", 2);
    this.line([bars.D, bars.L], "#8fd09a", 2);
    // scaling ray O -> L -> E makes the pantograph identity visible
    this.line([bars.O, bars.E], "#555f75", 1);
    this.dot(bars.O, "#ffffff", 3);
    this.dot(bars.L, "#8fd09a", 4);
    this.dot(bars.E, "#46b4ff", 5);
    this.dot(rec.raw_target_m, "#b4503c", 3);
  }

  private drawGauges(rec: StepRecord): void {
    const press = rec.contact.penetration_raw_m / this.geometry.alpha;
    el<HTMLSpanElement>("press-depth").textContent = `${(press * 1000).toFixed(1)} mm`;
    el<HTMLSpanElement>("force-gain").textContent =
      `x${forceGain(this.geometry).toFixed(2)}`;
    const contact = rec.contact.in_contact
      ? `contact (${rec.contact.dof_translational}T+${rec.contact.dof_rotational}R free)`
      : "free motion (3T+2R)";
    el<HTMLSpanElement>("contact-state").textContent = contact;
  }
}

export function start(): void {
  const socket = new WebSocket(wsUrl()) as unknown as SocketLike;
  new Workbench(socket);
}

declare global {
  interface Window {
    pantosimStart?: () => void;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.pantosimStart = start;
  if (document.readyState === "complete" || document.readyState === "interactive") {
    start();
  } else {
    window.addEventListener("DOMContentLoaded", start);
  }
}
