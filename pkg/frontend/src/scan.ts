// Floor-plan scan composer: turns a drawn polyline and placed objects into a
// scan log the service ingests. Timestamps are synthetic, at a fixed author
// walking speed, since nobody actually walked anywhere.

export const AUTHOR_WALK_SPEED_MPS = 1.2;
export const SCAN_LOG_VERSION = 1;

export interface FloorPoint {
  x: number;
  y: number;
}

export interface PlacedObject {
  objectId: string;
  x: number;
  y: number;
}

export interface ComposedScan {
  lines: string[];
  jsonl: string;
  totalLengthM: number;
  durationS: number;
  warnings: string[];
}

export function pathLengthM(path: FloorPoint[]): number {
  let total = 0;
  for (let i = 1; i < path.length; i++) {
    total += Math.hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  }
  return total;
}

export function composeScanLog(
  path: FloorPoint[],
  objects: PlacedObject[],
  speedMps: number = AUTHOR_WALK_SPEED_MPS,
): ComposedScan {
  if (path.length < 2) {
    throw new Error("trajectory needs at least 2 points; keep drawing");
  }
  if (speedMps <= 0) {
    throw new Error("walking speed must be positive");
  }
  const warnings: string[] = [];
  const lines: string[] = [JSON.stringify({ type: "header", version: SCAN_LOG_VERSION })];

  let arc = 0;
  let lastT = -1;
  let lastPoint: FloorPoint | null = null;
  for (const point of path) {
    if (lastPoint !== null) {
      arc += Math.hypot(point.x - lastPoint.x, point.y - lastPoint.y);
    }
    lastPoint = point;
    const t = arc / speedMps;
    if (t <= lastT) {
      continue; // duplicated point would stall the clock
    }
    lastT = t;
    lines.push(JSON.stringify({ type: "trajectory", t_s: t, x_m: point.x, y_m: point.y }));
  }

  if (objects.length === 0) {
    warnings.push("no objects placed; the group will carry trajectory-only context");
  } else {
    lines.push(
      JSON.stringify({
        type: "snapshot",
        t_s: lastT,
        detections: objects.map((o) => ({
          object_id: o.objectId,
          pose_6dof: { position: [o.x, o.y, 0], quaternion: [0, 0, 0, 1] },
          confidence: 1.0, // author-placed, not detected
        })),
      }),
    );
  }

  return {
    lines,
    jsonl: lines.join("\n") + "\n",
    totalLengthM: arc,
    durationS: lastT,
    warnings,
  };
}
