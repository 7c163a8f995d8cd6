// Session-service client: envelope building, seq tracking, transcripts.
//
// The client owns no simulation state; it only forwards user intent and
// hands inbound telemetry to whoever subscribes.

import type { Envelope, SocketLike, TelemetryMessage, Vec3 } from "./types.js";

export type TelemetryHandler = (msg: TelemetryMessage) => void;
export type ErrorHandler = (code: string, detail: string) => void;

export class SimClient {
  private socket: SocketLike;
  private seq = 0;
  private sessionId: string | null = null;
  /** every message sent, in order (for transcript diffing) */
  readonly sent: Envelope[] = [];
  /** every message received, in order */
  readonly received: Envelope[] = [];
  onTelemetry: TelemetryHandler | null = null;
  onError: ErrorHandler | null = null;
  onSession: ((id: string) => void) | null = null;

  constructor(socket: SocketLike) {
    this.socket = socket;
    socket.onmessage = (ev) => this.handleRaw(ev.data);
  }

  get session(): string | null {
    return this.sessionId;
  }

  private post(type: string, payload?: Record<string, unknown>): Envelope {
    const msg: Envelope = { type, seq: this.seq++, payload };
    if (this.sessionId !== null) msg.session_id = this.sessionId;
    this.sent.push(msg);
    this.socket.send(JSON.stringify(msg));
    return msg;
  }

  private handleRaw(data: string): void {
    let msg: Envelope;
    try {
      msg = JSON.parse(data) as Envelope;
    } catch {
      return;
    }
    this.received.push(msg);
    if (msg.type === "telemetry") {
      const t = msg as TelemetryMessage;
      if (this.sessionId === null) {
        this.sessionId = t.session_id;
        if (this.onSession) this.onSession(t.session_id);
      }
      if (this.onTelemetry) this.onTelemetry(t);
    } else if (msg.type === "error" && this.onError) {
      const p = (msg.payload ?? {}) as { code?: string; detail?: string };
      this.onError(p.code ?? "unknown", p.detail ?? "");
    }
  }

  hello(): void {
    this.post("hello", { proto: 1 });
  }

  createSession(options?: {
    bundle?: string;
    scene?: Record<string, unknown>;
    geometry?: Record<string, unknown>;
  }): void {
    this.sessionId = null;
    this.post("create_session", options ? { ...options } : {});
  }

  setTarget(target: Vec3, pitch = 0, yaw = 0): void {
    this.post("set_target", { target_m: target, pitch_rad: pitch, yaw_rad: yaw });
  }

  setPlaneSetpoint(heightM: number): void {
    this.post("set_plane_setpoint", { height_m: heightM });
  }

  step(dtS?: number): void {
    this.post("step", dtS === undefined ? {} : { dt_s: dtS });
  }

  run(steps: number, keepEvery = 1, dtS?: number): void {
    const payload: Record<string, unknown> = { steps, keep_every: keepEvery };
    if (dtS !== undefined) payload.dt_s = dtS;
    this.post("run", payload);
  }

  close(): void {
    if (this.sessionId !== null) this.post("close", {});
    this.sessionId = null;
  }
}
