// Playback timeline math: frame/time conversion and step boundary markers.
// All inputs come from the service's plan and motion payloads.

import type { PlanDto } from "./types.js";

export function durationSeconds(frameCount: number, fps: number): number {
  return frameCount / fps;
}

export function timeAtFrame(frame: number, fps: number): number {
  return frame / fps;
}

export function frameAtFraction(fraction: number, frameCount: number): number {
  const clamped = Math.min(1, Math.max(0, fraction));
  return Math.min(frameCount - 1, Math.floor(clamped * frameCount));
}

export interface BoundaryMarker {
  frame: number;
  fraction: number; // position along the timeline in [0, 1]
  label: string;
}

export function planTotalFrames(plan: PlanDto): number {
  return plan.steps[plan.steps.length - 1].frame_range[1];
}

export function boundaryMarkers(plan: PlanDto): BoundaryMarker[] {
  const total = planTotalFrames(plan);
  return plan.steps.slice(1).map((step) => ({
    frame: step.frame_range[0],
    fraction: step.frame_range[0] / total,
    label: step.text,
  }));
}

export function stepIndexAtFrame(plan: PlanDto, frame: number): number {
  for (let i = 0; i < plan.steps.length; i++) {
    const [a, b] = plan.steps[i].frame_range;
    if (frame >= a && frame < b) return i;
  }
  return plan.steps.length - 1;
}
