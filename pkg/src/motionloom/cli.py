"""Command-line interface: stitch, metrics, generate, demo-data, serve, demo."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .core import (
    Keypoint,
    ValidationError,
    concat,
    load_motion,
    save_motion,
)
from .diffusion import Denoiser, NoiseSchedule, TrainConfig, train, make_dataset, walker_dataset
from .metrics import SpatialSpec, TransitionSpec, spatial_distance, transition_distance
from .pipeline import execute_plan
from .scenarios import build_demo_project, scenario_names
from .service import SERVICE_TRAIN_SEED, serve
from .session import DEFAULT_FRAMES_PER_STEP, GenerationPlan
from .smoothing import DEFAULT_BLEND_LEN, BlendConfig, stitch


def _cmd_stitch(args) -> int:
    clips = [load_motion(p) for p in args.inputs]
    cfg = BlendConfig(args.blend_len)
    smoothed = stitch(clips, cfg)
    save_motion(smoothed, args.out)
    if len(clips) > 1:
        naive = concat(clips)
        spec = TransitionSpec.from_clip(naive)
        before = transition_distance(naive, spec)
        after = transition_distance(smoothed, spec)
        print(f"transition distance before: {before:.4f} m")
        print(f"transition distance after:  {after:.4f} m")
    else:
        print("single clip: nothing to blend")
    print(f"wrote {smoothed.n_frames} frames to {args.out}")
    return 0


def _parse_boundaries(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad boundary list {text!r}: {exc}") from exc


def _load_targets(path: str) -> SpatialSpec:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    targets = tuple(
        (
            int(t["frame"]),
            Keypoint(
                x_m=float(t["x_m"]),
                y_m=float(t["y_m"]),
                object_id=str(t.get("object_id", "target")),
            ),
        )
        for t in data["targets"]
    )
    return SpatialSpec(targets=targets)


def _cmd_metrics(args) -> int:
    clip = load_motion(args.motion)
    boundaries = _parse_boundaries(args.boundaries) if args.boundaries else list(clip.boundaries)
    if boundaries:
        spec = TransitionSpec.from_boundaries(boundaries)
        print(f"transition distance: {transition_distance(clip, spec):.4f} m")
    else:
        print("transition distance: n/a (no boundaries)")
    if args.targets:
        spatial = spatial_distance(clip, _load_targets(args.targets))
        verdict = "plausible" if spatial < 0.1 else "not plausible"
        print(f"spatial distance:    {spatial:.4f} m ({verdict}, threshold 0.1 m)")
    return 0


def _denoiser_from_args(args) -> Denoiser:
    if args.checkpoint:
        return Denoiser.load(args.checkpoint)
    print("no checkpoint given; training the default walker model (deterministic)")
    return train(
        walker_dataset(seed=SERVICE_TRAIN_SEED),
        NoiseSchedule.linear(),
        TrainConfig(steps=800, batch_size=48, seed=SERVICE_TRAIN_SEED),
    )


def _cmd_generate(args) -> int:
    plan = GenerationPlan.load(args.plan)
    denoiser = _denoiser_from_args(args)
    result = execute_plan(
        plan,
        denoiser,
        seed=args.seed,
        blend_len=args.blend_len,
        guidance_scale=args.guidance_scale,
    )
    save_motion(result.motion, args.out)
    rep = result.report
    print(f"generated {result.motion.n_frames} frames ({len(plan.steps)} steps)")
    if rep.naive.transition_m is not None:
        print(
            f"transition distance: naive {rep.naive.transition_m:.4f} m -> "
            f"smoothed {rep.smoothed.transition_m:.4f} m"
        )
    if rep.smoothed.spatial_m is not None:
        print(f"spatial distance: {rep.smoothed.spatial_m:.4f} m (plausible: {rep.plausible})")
    print(f"wrote {args.out}")
    return 0


def _cmd_demo_data(args) -> int:
    dataset = make_dataset(args.task, n=args.n, seed=args.seed)
    dataset.save(args.out)
    print(
        f"wrote {len(dataset.clips)} '{args.task}' clips "
        f"({dataset.skeleton.joint_count} joints) to {args.out}"
    )
    return 0


def _cmd_serve(args) -> int:
    serve(args.data_dir, port=args.port, ui_dir=args.ui_dir)
    return 0


def _cmd_demo(args) -> int:
    if args.list:
        for name in scenario_names():
            print(name)
        return 0
    if not args.scenario:
        raise ValidationError("pass --scenario <name> or --list")
    project = build_demo_project(args.scenario)
    plan = project.compile_plan(frames_per_step=args.frames_per_step)
    text = plan.dumps()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote plan to {args.out}")
    else:
        print(text, end="")
    print(
        f"# scenario {args.scenario}: {len(plan.steps)} steps, "
        f"{plan.total_frames} frames",
        file=sys.stderr,
    )
    for warning in plan.warnings:
        print(f"# warning: {warning}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motionloom", description=__doc__)
    parser.add_argument("--version", action="version", version=f"motionloom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stitch", help="blend motion clips at their junctions")
    p.add_argument("--in", dest="inputs", action="append", required=True, metavar="CLIP")
    p.add_argument("--blend-len", type=int, default=DEFAULT_BLEND_LEN)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_stitch)

    p = sub.add_parser("metrics", help="transition / spatial distances of a motion file")
    p.add_argument("--motion", required=True)
    p.add_argument("--boundaries", help="comma-separated first-frame indices, e.g. 60,120")
    p.add_argument("--targets", help="JSON file with spatial targets")
    p.set_defaults(fn=_cmd_metrics)

    p = sub.add_parser("generate", help="run a generation plan through the pipeline")
    p.add_argument("--plan", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blend-len", type=int, default=DEFAULT_BLEND_LEN)
    p.add_argument("--guidance-scale", type=float, default=None)
    p.add_argument("--checkpoint", help="denoiser checkpoint file (else train the default)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("demo-data", help="write a synthetic training dataset")
    p.add_argument("--task", default="two-class", choices=["two-class", "walker"])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="demo-data.json")
    p.set_defaults(fn=_cmd_demo_data)

    p = sub.add_parser("serve", help="run the authoring service")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--data-dir", default="./motionloom-data")
    p.add_argument("--ui-dir", help="also serve the built authoring client from this dir")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("demo", help="emit a generation plan for a shipped scenario")
    p.add_argument("--scenario")
    p.add_argument("--list", action="store_true", help="list scenario names")
    p.add_argument("--frames-per-step", type=int, default=DEFAULT_FRAMES_PER_STEP)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
