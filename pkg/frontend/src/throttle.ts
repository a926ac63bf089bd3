// Trailing-edge throttle for the jog sliders: at most one send per
// interval, and the last value always goes out.

export class Throttle<T> {
  private lastSent = -Infinity;
  private queued: T | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly intervalMs: number,
    private readonly emit: (value: T) => void,
    private readonly now: () => number = () => Date.now(),
  ) {}

  push(value: T): void {
    const at = this.now();
    if (at - this.lastSent >= this.intervalMs) {
      this.lastSent = at;
      this.emit(value);
      return;
    }
    this.queued = value;
    if (this.timer === null) {
      const wait = this.intervalMs - (at - this.lastSent);
      this.timer = setTimeout(() => this.flush(), wait);
    }
  }

  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.queued !== null) {
      this.lastSent = this.now();
      this.emit(this.queued);
      this.queued = null;
    }
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.queued = null;
  }
}
