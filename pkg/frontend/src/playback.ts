// Stick-figure playback over the floor plan: top-down and side elevation,
// frame-accurate scrubbing, step boundary markers on the timeline.

import { bonesForScale, motionBounds, sideSegments, topDownSegments, type Bounds } from "./skeleton.js";
import { boundaryMarkers, durationSeconds, frameAtFraction, stepIndexAtFrame, timeAtFrame } from "./timeline.js";
import type { MotionDto, PlanDto } from "./types.js";

export class PlaybackViewer {
  motion: MotionDto | null = null;
  plan: PlanDto | null = null;
  frame = 0;
  playing = false;
  private topCtx: CanvasRenderingContext2D;
  private sideCtx: CanvasRenderingContext2D;
  private topBounds: Bounds | null = null;
  private sideBounds: Bounds | null = null;
  private lastTick = 0;
  private accumulator = 0;

  constructor(
    private topCanvas: HTMLCanvasElement,
    private sideCanvas: HTMLCanvasElement,
    private scrubber: HTMLInputElement,
    private markerLane: HTMLElement,
    private clock: HTMLElement,
  ) {
    this.topCtx = topCanvas.getContext("2d")!;
    this.sideCtx = sideCanvas.getContext("2d")!;
    scrubber.addEventListener("input", () => {
      if (!this.motion) return;
      this.playing = false;
      this.frame = frameAtFraction(Number(scrubber.value) / 1000, this.motion.frames.length);
      this.render();
    });
    requestAnimationFrame((t) => this.tick(t));
  }

  load(motion: MotionDto, plan: PlanDto): void {
    this.motion = motion;
    this.plan = plan;
    this.frame = 0;
    this.topBounds = motionBounds(motion, "top");
    this.sideBounds = motionBounds(motion, "side");
    this.renderMarkers();
    this.render();
  }

  togglePlay(): void {
    this.playing = !this.playing;
    this.accumulator = 0;
  }

  private tick(now: number): void {
    const dt = (now - this.lastTick) / 1000;
    this.lastTick = now;
    if (this.playing && this.motion) {
      this.accumulator += dt;
      const frameTime = 1 / this.motion.fps;
      while (this.accumulator >= frameTime) {
        this.accumulator -= frameTime;
        this.frame = (this.frame + 1) % this.motion.frames.length;
      }
      this.render();
    }
    requestAnimationFrame((t) => this.tick(t));
  }

  private renderMarkers(): void {
    this.markerLane.textContent = "";
    if (!this.plan) return;
    for (const marker of boundaryMarkers(this.plan)) {
      const tick = document.createElement("div");
      tick.className = "boundary-marker";
      tick.style.left = `${marker.fraction * 100}%`;
      tick.title = `frame ${marker.frame}: ${marker.label}`;
      this.markerLane.appendChild(tick);
    }
  }

  render(): void {
    const motion = this.motion;
    if (!motion) return;
    const frame = motion.frames[this.frame];
    const scale =
      this.plan !== null
        ? this.plan.steps[stepIndexAtFrame(this.plan, this.frame)].scale
        : "full_body";
    const bones = bonesForScale(motion.skeleton.joint_names, scale);
    this.drawView(this.topCtx, this.topCanvas, topDownSegments(frame, bones), this.topBounds!);
    this.drawView(this.sideCtx, this.sideCanvas, sideSegments(frame, bones), this.sideBounds!);
    this.scrubber.value = String(Math.round((this.frame / motion.frames.length) * 1000));
    const t = timeAtFrame(this.frame, motion.fps).toFixed(2);
    const total = durationSeconds(motion.frames.length, motion.fps).toFixed(1);
    this.clock.textContent = `frame ${this.frame} / ${motion.frames.length}  -  ${t}s / ${total}s`;
  }

  private drawView(
    ctx: CanvasRenderingContext2D,
    canvas: HTMLCanvasElement,
    segments: { x1: number; y1: number; x2: number; y2: number }[],
    bounds: Bounds,
  ): void {
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    const spanX = bounds.maxX - bounds.minX;
    const spanY = bounds.maxY - bounds.minY;
    const s = Math.min(canvas.width / spanX, canvas.height / spanY);
    const toX = (x: number) => (x - bounds.minX) * s + (canvas.width - spanX * s) / 2;
    const toY = (y: number) => canvas.height - ((y - bounds.minY) * s + (canvas.height - spanY * s) / 2);
    ctx.strokeStyle = "#6fe3a5";
    ctx.lineWidth = 2;
    for (const seg of segments) {
      ctx.beginPath();
      ctx.moveTo(toX(seg.x1), toY(seg.y1));
      ctx.lineTo(toX(seg.x2), toY(seg.y2));
      ctx.stroke();
    }
  }
}
