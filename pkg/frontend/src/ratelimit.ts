// Outbound message rate limiter: drag streams are capped at 120 msg/s.

export class RateLimiter {
  private intervalMs: number;
  private lastMs = -Infinity;

  constructor(maxPerSecond: number) {
    if (maxPerSecond <= 0) throw new Error("maxPerSecond must be positive");
    this.intervalMs = 1000 / maxPerSecond;
  }

  /** true when a message may be sent at time nowMs */
  allow(nowMs: number): boolean {
    if (nowMs - this.lastMs >= this.intervalMs) {
      this.lastMs = nowMs;
      return true;
    }
    return false;
  }

  reset(): void {
    this.lastMs = -Infinity;
  }
}
