// Drag controller: screen deltas become rate-limited set_target messages.
//
// The dragged target is the client's *intent*; the displayed hand is always
// the telemetry pose, so dragging through the table visibly stops at the
// surface while the press-depth gauge rises.

import { OrbitCamera, Screen } from "./camera.js";
import { SimClient } from "./protocol.js";
import { RateLimiter } from "./ratelimit.js";
import type { Vec3 } from "./types.js";

export const MAX_DRAG_RATE_HZ = 120;

export class DragController {
  private client: SimClient;
  private camera: OrbitCamera;
  private limiter: RateLimiter;
  private target: Vec3 | null = null;
  private pending = false;
  /** messages suppressed by the rate limiter (coalesced, not lost) */
  coalesced = 0;

  constructor(client: SimClient, camera: OrbitCamera, limiter?: RateLimiter) {
    this.client = client;
    this.camera = camera;
    this.limiter = limiter ?? new RateLimiter(MAX_DRAG_RATE_HZ);
  }

  beginAt(worldPoint: Vec3): void {
    this.target = [...worldPoint] as Vec3;
  }

  /** accumulate a pointer move; sends at most one set_target per tick */
  moveBy(dxPx: number, dyPx: number, screen: Screen, nowMs: number): void {
    if (this.target === null) return;
    const d = this.camera.unprojectDelta(dxPx, dyPx, screen);
    this.target = [
      this.target[0] + d[0],
      this.target[1] + d[1],
      this.target[2] + d[2],
    ];
    if (this.limiter.allow(nowMs)) {
      this.client.setTarget(this.target);
      this.pending = false;
    } else {
      this.coalesced += 1;
      this.pending = true;
    }
  }

  /** flush a coalesced move once the rate window reopens */
  tick(nowMs: number): void {
    if (this.pending && this.target !== null && this.limiter.allow(nowMs)) {
      this.client.setTarget(this.target);
      this.pending = false;
    }
  }

  end(): void {
    this.target = null;
    this.pending = false;
  }

  get currentTarget(): Vec3 | null {
    return this.target;
  }
}
