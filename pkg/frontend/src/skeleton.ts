// Stick-figure geometry for the dual playback views (top-down and side
// elevation). This is rendering math only: it projects served joint
// positions onto the two canvas planes, it never measures anything.

import type { MotionDto, RenderScale } from "./types.js";

type Bone = [number, number];

// Bone graph for the 22-joint layout the service ships by default.
const BONES_22: Bone[] = [
  [0, 1], [1, 4], [4, 7], [7, 10], // left leg
  [0, 2], [2, 5], [5, 8], [8, 11], // right leg
  [0, 3], [3, 6], [6, 9], [9, 12], [12, 15], // spine to head
  [12, 13], [13, 16], [16, 18], [18, 20], // left arm
  [12, 14], [14, 17], [17, 19], [19, 21], // right arm
];

const ARM_JOINTS_22 = new Set([13, 14, 16, 17, 18, 19, 20, 21]);

export function boneList(jointNames: string[]): Bone[] {
  if (jointNames.length === 22) return BONES_22;
  // generic skeleton: a simple chain
  const bones: Bone[] = [];
  for (let i = 1; i < jointNames.length; i++) bones.push([i - 1, i]);
  return bones;
}

export function bonesForScale(jointNames: string[], scale: RenderScale): Bone[] {
  const bones = boneList(jointNames);
  if (scale !== "hands_only" || jointNames.length !== 22) return bones;
  return bones.filter(([a, b]) => ARM_JOINTS_22.has(a) && ARM_JOINTS_22.has(b));
}

export interface Segment2D {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

// Ground-plane projection (x east, y north).
export function topDownSegments(frame: number[][], bones: Bone[]): Segment2D[] {
  return bones.map(([a, b]) => ({
    x1: frame[a][0],
    y1: frame[a][1],
    x2: frame[b][0],
    y2: frame[b][1],
  }));
}

// Side elevation (x along the walk, z up).
export function sideSegments(frame: number[][], bones: Bone[]): Segment2D[] {
  return bones.map(([a, b]) => ({
    x1: frame[a][0],
    y1: frame[a][2],
    x2: frame[b][0],
    y2: frame[b][2],
  }));
}

export interface Bounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

// Fixed bounds over the whole motion so the camera does not swim.
export function motionBounds(motion: MotionDto, plane: "top" | "side", pad = 0.5): Bounds {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  const yIndex = plane === "top" ? 1 : 2;
  for (const frame of motion.frames) {
    for (const joint of frame) {
      minX = Math.min(minX, joint[0]);
      maxX = Math.max(maxX, joint[0]);
      minY = Math.min(minY, joint[yIndex]);
      maxY = Math.max(maxY, joint[yIndex]);
    }
  }
  return { minX: minX - pad, maxX: maxX + pad, minY: minY - pad, maxY: maxY + pad };
}
