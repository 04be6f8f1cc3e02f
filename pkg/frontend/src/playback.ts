/** Replay playback timing.
 *
 * Replays run at one times wall clock: a trajectory of n samples spaced dt
 * seconds apart takes (n - 1) * dt seconds of screen time. The cursor maps
 * elapsed wall time to the sample index without interpolation, so a
 * trajectory recorded at 20 steps per second advances visibly in steps.
 */

export interface TrajectoryTiming {
  /** Seconds between consecutive samples. */
  dt: number;
  /** Number of samples. */
  sampleCount: number;
}

/** Total playback duration in seconds. */
export function durationSeconds(t: TrajectoryTiming): number {
  return t.sampleCount > 1 ? (t.sampleCount - 1) * t.dt : 0;
}

/** Sample index shown `elapsed` seconds into playback, clamped to range. */
export function sampleIndexAt(t: TrajectoryTiming, elapsed: number): number {
  if (t.sampleCount <= 1 || elapsed <= 0) return 0;
  const i = Math.floor(elapsed / t.dt);
  return Math.min(i, t.sampleCount - 1);
}

/** Whether playback has shown its final sample. */
export function playbackDone(t: TrajectoryTiming, elapsed: number): boolean {
  return elapsed >= durationSeconds(t);
}
