// Playback cursor over fixed-rate trajectory frames. The frame index is
// derived from accumulated time (not incremented per tick), so timing drift
// never exceeds one frame regardless of tick cadence.

export class Playback {
  private elapsedMs = 0;
  playing = false;

  constructor(
    readonly frameCount: number,
    readonly fps: number = 30,
  ) {}

  get durationMs(): number {
    return (this.frameCount / this.fps) * 1000;
  }

  get frame(): number {
    if (this.frameCount === 0) return 0;
    const idx = Math.floor((this.elapsedMs / 1000) * this.fps);
    return Math.min(idx, this.frameCount - 1);
  }

  get atEnd(): boolean {
    return this.frameCount === 0 || this.frame >= this.frameCount - 1;
  }

  play(): void {
    if (this.atEnd) this.elapsedMs = 0;
    this.playing = true;
  }

  pause(): void {
    this.playing = false;
  }

  tick(dtMs: number): void {
    if (!this.playing) return;
    this.elapsedMs = Math.min(this.elapsedMs + dtMs, this.durationMs);
    if (this.atEnd) this.playing = false;
  }

  scrubTo(frame: number): void {
    const clamped = Math.max(0, Math.min(frame, this.frameCount - 1));
    this.elapsedMs = (clamped / this.fps) * 1000;
    this.playing = false;
  }
}
