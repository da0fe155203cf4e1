#!/usr/bin/env python3
"""Run one shipped scenario through the whole pipeline in-process.

Builds the demo project (script + group + synthesized scan), trains or loads
the walker model, executes the plan (generate -> guide -> stitch), and prints
the smoothed-vs-naive report.

Usage: python scripts/demo_pipeline.py [--scenario use-a-3d-printer] [--seed 42]
       [--checkpoint walker.json] [--out motion.json]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from motionloom.core import save_motion
from motionloom.diffusion import Denoiser, NoiseSchedule, TrainConfig, train, walker_dataset
from motionloom.pipeline import execute_plan
from motionloom.scenarios import build_demo_project, scenario_names


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--scenario", default="use-a-3d-printer", choices=scenario_names())
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--blend-len", type=int, default=15)
    parser.add_argument("--checkpoint")
    parser.add_argument("--out", default="demo-motion.json")
    args = parser.parse_args()

    schedule = NoiseSchedule.linear()
    if args.checkpoint and Path(args.checkpoint).exists():
        denoiser = Denoiser.load(args.checkpoint)
        print(f"loaded checkpoint {args.checkpoint}")
    else:
        t0 = time.monotonic()
        denoiser = train(walker_dataset(seed=1234), schedule, TrainConfig(steps=800, batch_size=48, seed=1234))
        print(f"trained walker model in {time.monotonic() - t0:.1f}s")
        if args.checkpoint:
            denoiser.save(args.checkpoint)

    project = build_demo_project(args.scenario)
    plan = project.compile_plan()
    for warning in plan.warnings:
        print(f"warning: {warning}")

    t0 = time.monotonic()
    result = execute_plan(plan, denoiser, schedule, seed=args.seed, blend_len=args.blend_len)
    print(f"executed {len(plan.steps)} steps / {plan.total_frames} frames in {time.monotonic() - t0:.1f}s")

    rep = result.report
    print(f"transition distance: naive {rep.naive.transition_m:.4f} m -> smoothed {rep.smoothed.transition_m:.4f} m (ratio {rep.ratio:.2f})")
    if rep.smoothed.spatial_m is not None:
        print(f"spatial distance: {rep.smoothed.spatial_m:.4f} m (plausible: {rep.plausible})")
    save_motion(result.motion, args.out)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
