import { describe, expect, it } from "vitest";

import {
  boundaryMarkers,
  durationSeconds,
  frameAtFraction,
  planTotalFrames,
  stepIndexAtFrame,
} from "../src/timeline.js";
import type { PlanDto } from "../src/types.js";

function plan3x60(): PlanDto {
  const trajectory = {
    frame_of_reference: "floor",
    samples: [
      { t_s: 0, x_m: 0, y_m: 0 },
      { t_s: 1, x_m: 1, y_m: 0 },
    ],
  };
  return {
    fps: 20,
    skeleton: { joint_names: ["root"], root_index: 0, height_m: 1.75 },
    warnings: [],
    steps: [
      { text: "a", frame_range: [0, 60], scale: "full_body", trajectory, target: null },
      { text: "b", frame_range: [60, 120], scale: "full_body", trajectory, target: null },
      { text: "c", frame_range: [120, 180], scale: "hands_only", trajectory, target: null },
    ],
  };
}

describe("timeline", () => {
  it("180 frames at 20 fps is a 9.0 s timeline", () => {
    expect(durationSeconds(180, 20)).toBe(9.0);
  });

  it("boundary markers sit at the plan's frame ranges", () => {
    const markers = boundaryMarkers(plan3x60());
    expect(markers.map((m) => m.frame)).toEqual([60, 120]);
    expect(markers.map((m) => m.fraction)).toEqual([60 / 180, 120 / 180]);
  });

  it("scrubbing to frame 60 of a 3x60 plan aligns with the first marker", () => {
    const plan = plan3x60();
    const marker = boundaryMarkers(plan)[0];
    const frame = frameAtFraction(marker.fraction, planTotalFrames(plan));
    expect(frame).toBe(60);
    expect(stepIndexAtFrame(plan, frame)).toBe(1); // first frame of step b
    expect(stepIndexAtFrame(plan, frame - 1)).toBe(0);
  });

  it("clamps scrub fractions to valid frames", () => {
    expect(frameAtFraction(-0.5, 100)).toBe(0);
    expect(frameAtFraction(1.5, 100)).toBe(99);
  });

  it("reports the active step's render scale region", () => {
    const plan = plan3x60();
    expect(plan.steps[stepIndexAtFrame(plan, 179)].scale).toBe("hands_only");
  });
});
