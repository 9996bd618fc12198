/**
 * Outbound lead-target coalescing.  Input devices fire far faster than the
 * wire budget (a drag can produce hundreds of events per second); the
 * coalescer keeps only the newest target and releases it at a bounded rate,
 * so the final message always carries the latest position and an untouched
 * panel emits nothing at all.
 */

export class LeadCoalescer {
  private pending: number[] | null = null;
  private lastEmit = -Infinity;
  private readonly minInterval: number;

  /**
   * @param maxPerSecond ceiling on emitted messages per second
   * @param now monotonic clock in seconds (injectable for tests)
   */
  constructor(
    maxPerSecond: number,
    private readonly now: () => number,
  ) {
    if (!(maxPerSecond > 0)) throw new Error("maxPerSecond must be positive");
    this.minInterval = 1 / maxPerSecond;
  }

  /** Record a new desired target; overwrites any unsent one. */
  update(q: readonly number[]): void {
    this.pending = [...q];
  }

  /**
   * Return the target to send now, or null when there is nothing pending or
   * the rate budget is exhausted.  Call from a timer at any convenient rate;
   * polling faster than maxPerSecond never raises the outbound rate.
   */
  poll(): number[] | null {
    if (this.pending === null) return null;
    const t = this.now();
    if (t - this.lastEmit < this.minInterval) return null;
    this.lastEmit = t;
    const out = this.pending;
    this.pending = null;
    return out;
  }

  /** True when a target is recorded but not yet released. */
  get dirty(): boolean {
    return this.pending !== null;
  }
}
