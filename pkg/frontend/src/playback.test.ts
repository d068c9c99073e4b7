import { describe, expect, it } from "vitest";

import { Playback } from "./playback.js";
import { mockWhatIf } from "./fixtures.js";

describe("Playback", () => {
  it("frame count equals the 30 Hz trajectory length", () => {
    const answer = mockWhatIf(150);
    const frames = Math.max(...answer.trajectories_30hz.map((t) => t.samples.length));
    const playback = new Playback(frames);
    expect(playback.frameCount).toBe(150);
    playback.scrubTo(9999);
    expect(playback.frame).toBe(149);
  });

  it("keeps timing drift under one frame across a full 5 s clip", () => {
    const playback = new Playback(150, 30);
    playback.play();
    // irregular tick cadence: 16.7, 31, 7, 16.7 ms ... summing exactly to 5 s
    const pattern = [16.7, 31.0, 7.0, 16.7, 12.3];
    let elapsed = 0;
    let i = 0;
    while (elapsed < 5000) {
      const dt = Math.min(pattern[i % pattern.length], 5000 - elapsed);
      elapsed += dt;
      playback.tick(dt);
      const ideal = Math.min(Math.floor((elapsed / 1000) * 30), 149);
      expect(Math.abs(playback.frame - ideal)).toBeLessThan(1);
      i += 1;
    }
    expect(playback.frame).toBe(149);
    expect(playback.playing).toBe(false); // stops at the end
  });

  it("scrubbing pauses and clamps", () => {
    const playback = new Playback(150);
    playback.play();
    playback.scrubTo(-5);
    expect(playback.frame).toBe(0);
    expect(playback.playing).toBe(false);
    playback.scrubTo(75);
    expect(playback.frame).toBe(75);
  });

  it("replays from the start when played at the end", () => {
    const playback = new Playback(10, 30);
    playback.scrubTo(9);
    playback.play();
    expect(playback.frame).toBe(0);
  });
});
