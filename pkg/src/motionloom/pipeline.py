"""Plan execution: generate each step, guide it along its trajectory slice,
stitch the step clips, and report smoothed-vs-naive quality.

Steps are sampled independently (one single-segment assignment per step, with
a per-step seed derived from the request seed), which is exactly the regime
the temporal smoothing exists to fix: independently generated neighbors meet
with a pose jump at every junction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MotionClip, ValidationError, concat
from .diffusion import ConditionAssignment, Denoiser, NoiseSchedule, sample
from .guidance import apply_root_guidance, resample_trajectory
from .metrics import MetricsReport, SpatialSpec, report
from .session import GenerationPlan
from .smoothing import DEFAULT_BLEND_LEN, BlendConfig, stitch


@dataclass(frozen=True)
class PlanResult:
    motion: MotionClip  # the smoothed deliverable
    naive: MotionClip
    report: MetricsReport


def step_seed(seed: int, step_index: int) -> int:
    """Stable per-step sub-seed for independent step sampling."""
    return int(np.random.SeedSequence((seed, step_index)).generate_state(1)[0])


def spatial_spec_for_plan(plan: GenerationPlan) -> SpatialSpec | None:
    """Default conditioned frames: the final frame of every step that carries
    a target keypoint (where the step culminates at its object)."""
    targets = [
        (step.frame_range[1] - 1, step.target)
        for step in plan.steps
        if step.target is not None
    ]
    if not targets:
        return None
    return SpatialSpec(targets=tuple(targets))


def execute_plan(
    plan: GenerationPlan,
    denoiser: Denoiser,
    schedule: NoiseSchedule | None = None,
    seed: int = 0,
    blend_len: int = DEFAULT_BLEND_LEN,
    guidance_scale: float | None = None,
    strength: str = "ramp",
) -> PlanResult:
    schedule = schedule or NoiseSchedule.linear()
    if denoiser.skeleton != plan.skeleton:
        raise ValidationError("plan skeleton does not match the trained model")
    cfg = BlendConfig(blend_len)
    for i, step in enumerate(plan.steps):
        if step.n_frames < 2 * cfg.L:
            raise ValidationError(
                f"plan step {i} spans {step.n_frames} frames; blending with "
                f"L={cfg.L} needs at least {2 * cfg.L}"
            )
    kwargs = {} if guidance_scale is None else {"guidance_scale": guidance_scale}
    clips = []
    for i, step in enumerate(plan.steps):
        assignment = ConditionAssignment.from_lengths(
            [(step.text, step.n_frames)], denoiser.embedding_dim
        )
        # hint the sampler to start where the step's path slice starts, so
        # consecutive step clips meet with pose-sized (not room-sized) jumps
        slice_start = step.trajectory.samples[0]
        start_root = np.array(
            [slice_start.x_m, slice_start.y_m, denoiser.default_start_root[2]]
        )
        clip = sample(
            assignment,
            denoiser,
            schedule,
            rng_seed=step_seed(seed, i),
            label=step.text,
            start_root=start_root,
            **kwargs,
        )
        targets = resample_trajectory(step.trajectory, step.n_frames, strength)
        clips.append(apply_root_guidance(clip, targets))
    naive = concat(clips)
    smoothed = stitch(clips, cfg) if len(clips) > 1 else naive
    rep = report(naive, smoothed, spatial=spatial_spec_for_plan(plan))
    return PlanResult(motion=smoothed, naive=naive, report=rep)
