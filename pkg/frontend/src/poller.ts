/**
 * Repeats an async tick on a fixed interval. One tick runs at a time: if the
 * previous tick is still in flight when the timer fires, that firing is
 * skipped rather than stacking requests behind a slow server. start() runs
 * the first tick immediately; stop() cancels the timer, so navigating away
 * from a view tears its loop down cleanly.
 */
export class Poller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;

  constructor(
    private readonly tick: () => Promise<void>,
    private readonly intervalSeconds: number,
  ) {
    if (intervalSeconds < 1) {
      throw new Error(`poll interval must be at least 1 second, got ${intervalSeconds}`);
    }
  }

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.fire(), this.intervalSeconds * 1000);
    void this.fire();
  }

  stop(): void {
    if (this.timer === null) return;
    clearInterval(this.timer);
    this.timer = null;
  }

  /** One guarded tick. Exposed so a view can force an immediate refresh. */
  async fire(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      await this.tick();
    } catch {
      // ticks are expected to record their own failures; a throw here must
      // not kill the interval
    } finally {
      this.inFlight = false;
    }
  }
}
