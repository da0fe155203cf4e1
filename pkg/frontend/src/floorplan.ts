// Interactive 2-D floor plan: draw the author walk as a polyline and drop
// object keypoints. Stands in for walking the real space with a headset.

import type { FloorPoint, PlacedObject } from "./scan.js";
import type { PlanDto } from "./types.js";

export type FloorMode = "draw" | "object";

const GRID_METERS = 1.0;

export class FloorPlan {
  path: FloorPoint[] = [];
  objects: PlacedObject[] = [];
  mode: FloorMode = "draw";
  onChange: (() => void) | null = null;
  private plan: PlanDto | null = null;
  private ctx: CanvasRenderingContext2D;
  private pxPerMeter = 50;

  constructor(private canvas: HTMLCanvasElement, private promptObjectId: () => string | null) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
    canvas.addEventListener("click", (event) => this.handleClick(event));
    this.render();
  }

  private toWorld(event: MouseEvent): FloorPoint {
    const rect = this.canvas.getBoundingClientRect();
    const px = ((event.clientX - rect.left) / rect.width) * this.canvas.width;
    const py = ((event.clientY - rect.top) / rect.height) * this.canvas.height;
    return {
      x: (px - this.canvas.width / 2) / this.pxPerMeter,
      y: (this.canvas.height / 2 - py) / this.pxPerMeter,
    };
  }

  private toScreen(point: { x: number; y: number }): [number, number] {
    return [
      this.canvas.width / 2 + point.x * this.pxPerMeter,
      this.canvas.height / 2 - point.y * this.pxPerMeter,
    ];
  }

  private handleClick(event: MouseEvent): void {
    const world = this.toWorld(event);
    if (this.mode === "draw") {
      this.path.push(world);
    } else {
      const objectId = this.promptObjectId();
      if (!objectId || !objectId.trim()) return;
      this.objects.push({ objectId: objectId.trim(), x: world.x, y: world.y });
    }
    this.onChange?.();
    this.render();
  }

  clear(): void {
    this.path = [];
    this.objects = [];
    this.onChange?.();
    this.render();
  }

  showPlan(plan: PlanDto | null): void {
    this.plan = plan;
    this.render();
  }

  render(): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    ctx.strokeStyle = "#1f2836";
    ctx.lineWidth = 1;
    const step = GRID_METERS * this.pxPerMeter;
    for (let x = (canvas.width / 2) % step; x < canvas.width; x += step) {
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, canvas.height);
      ctx.stroke();
    }
    for (let y = (canvas.height / 2) % step; y < canvas.height; y += step) {
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(canvas.width, y);
      ctx.stroke();
    }

    // compiled plan underlay: per-step trajectory slices and targets
    if (this.plan) {
      for (const planStep of this.plan.steps) {
        ctx.strokeStyle = "#2d4a66";
        ctx.lineWidth = 4;
        ctx.beginPath();
        planStep.trajectory.samples.forEach((s, i) => {
          const [sx, sy] = this.toScreen({ x: s.x_m, y: s.y_m });
          if (i === 0) ctx.moveTo(sx, sy);
          else ctx.lineTo(sx, sy);
        });
        ctx.stroke();
        if (planStep.target) {
          const [tx, ty] = this.toScreen({ x: planStep.target.x_m, y: planStep.target.y_m });
          ctx.strokeStyle = "#d9a62e";
          ctx.lineWidth = 2;
          ctx.strokeRect(tx - 5, ty - 5, 10, 10);
        }
      }
    }

    if (this.path.length > 0) {
      ctx.strokeStyle = "#3fa7ff";
      ctx.lineWidth = 2;
      ctx.beginPath();
      this.path.forEach((p, i) => {
        const [sx, sy] = this.toScreen(p);
        if (i === 0) ctx.moveTo(sx, sy);
        else ctx.lineTo(sx, sy);
      });
      ctx.stroke();
      for (const p of this.path) {
        const [sx, sy] = this.toScreen(p);
        ctx.fillStyle = "#3fa7ff";
        ctx.beginPath();
        ctx.arc(sx, sy, 3, 0, Math.PI * 2);
        ctx.fill();
      }
    }

    ctx.font = "12px sans-serif";
    for (const obj of this.objects) {
      const [sx, sy] = this.toScreen(obj);
      ctx.fillStyle = "#ffd166";
      ctx.beginPath();
      ctx.arc(sx, sy, 5, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillText(obj.objectId, sx + 8, sy + 4);
    }
  }
}
