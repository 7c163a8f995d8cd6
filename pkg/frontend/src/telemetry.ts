// Telemetry ring buffer and the frame-boundary display state.
//
// The displayed pose is always the newest server record that has been
// applied at a frame boundary: the client never extrapolates, interpolates,
// or computes kinematics of its own.

import type { StepRecord, TelemetryMessage } from "./types.js";

export interface TimedRecord {
  seq: number;
  record: StepRecord;
}

export class TelemetryBuffer {
  private ring: TimedRecord[] = [];
  private capacity: number;
  private lastSeq = -1;
  /** records discarded because they arrived out of order */
  dropped = 0;

  constructor(capacity = 512) {
    this.capacity = capacity;
  }

  push(msg: TelemetryMessage): boolean {
    // decimated streams skip records but never reorder them; anything
    // arriving with a stale seq is dropped so the timeline stays monotone
    if (msg.seq <= this.lastSeq) {
      this.dropped += 1;
      return false;
    }
    this.lastSeq = msg.seq;
    this.ring.push({ seq: msg.seq, record: msg.payload });
    if (this.ring.length > this.capacity) this.ring.shift();
    return true;
  }

  get size(): number {
    return this.ring.length;
  }

  latest(): TimedRecord | null {
    return this.ring.length ? this.ring[this.ring.length - 1] : null;
  }

  /** newest-first slice for plots/gauges */
  window(n: number): TimedRecord[] {
    return this.ring.slice(-n).reverse();
  }

  timeline(): number[] {
    return this.ring.map((r) => r.record.t_s);
  }

  clear(): void {
    this.ring = [];
    this.lastSeq = -1;
    this.dropped = 0;
  }
}

export class DisplayState {
  private buffer: TelemetryBuffer;
  private appliedSeq = -1;
  /** the record the view currently shows; null before first frame */
  current: StepRecord | null = null;
  /** how many frames have applied a record */
  framesApplied = 0;

  constructor(buffer: TelemetryBuffer) {
    this.buffer = buffer;
  }

  /** Apply the newest buffered record; called once per render frame. */
  applyFrame(): boolean {
    const latest = this.buffer.latest();
    if (latest === null || latest.seq === this.appliedSeq) return false;
    this.appliedSeq = latest.seq;
    this.current = latest.record;
    this.framesApplied += 1;
    return true;
  }
}
