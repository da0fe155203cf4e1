"""Reverse diffusion sampling with per-frame text conditioning.

Two conditioning modes are exposed. sample() feeds each frame the embedding
of the segment that contains it, so one reverse pass can realize several
actions in sequence. sample_prefix_mode() is the single-condition baseline:
the first segment's embedding is fed to every frame, the way a lone prefix
token would condition a whole sequence, so later segments' texts are ignored
by construction.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..core import MotionClip, ValidationError
from .embedding import ConditionAssignment
from .features import features_to_frames
from .model import Denoiser
from .schedule import NoiseSchedule

DEFAULT_GUIDANCE_SCALE = 2.5

# hook(t, cond_rows): called once per reverse step with the exact per-frame
# condition matrix passed to the conditional denoiser evaluation
SamplingHook = Callable[[int, np.ndarray], None]


def _reverse_diffusion(
    cond: np.ndarray,
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    guidance_scale: float,
    rng: np.random.Generator,
    hook: SamplingHook | None,
) -> np.ndarray:
    n_frames = cond.shape[0]
    null = np.zeros_like(cond)
    x = rng.standard_normal((n_frames, denoiser.feature_dim))
    for t in range(schedule.T, 0, -1):
        if hook is not None:
            hook(t, cond)
        x0_cond = denoiser.predict(x, cond, t, schedule.T)
        x0_uncond = denoiser.predict(x, null, t, schedule.T)
        x0_hat = x0_uncond + guidance_scale * (x0_cond - x0_uncond)

        ab_t = schedule.alpha_bar(t)
        ab_prev = schedule.alpha_bar(t - 1)
        beta_t = schedule.beta(t)
        alpha_t = 1.0 - beta_t
        coef_x0 = np.sqrt(ab_prev) * beta_t / (1.0 - ab_t)
        coef_xt = np.sqrt(alpha_t) * (1.0 - ab_prev) / (1.0 - ab_t)
        mean = coef_x0 * x0_hat + coef_xt * x
        if t > 1:
            var = beta_t * (1.0 - ab_prev) / (1.0 - ab_t)
            x = mean + np.sqrt(var) * rng.standard_normal(x.shape)
        else:
            x = mean
    return x


def _finish_clip(
    feats_norm: np.ndarray,
    assignment: ConditionAssignment,
    denoiser: Denoiser,
    start_root: np.ndarray | None,
    label: str | None,
) -> MotionClip:
    feats = denoiser.denormalize(feats_norm)
    start = denoiser.default_start_root if start_root is None else np.asarray(start_root)
    frames = features_to_frames(feats, denoiser.skeleton, start_root=start)
    if label is None:
        label = " / ".join(text for text, _ in assignment.segments)
    return MotionClip(
        skeleton=denoiser.skeleton,
        fps=denoiser.fps,
        frames=frames,
        label=label,
        boundaries=assignment.breakpoints,
    )


def sample(
    assignment: ConditionAssignment,
    denoiser: Denoiser,
    schedule: NoiseSchedule | None = None,
    guidance_scale: float = DEFAULT_GUIDANCE_SCALE,
    rng_seed: int = 0,
    hook: SamplingHook | None = None,
    start_root: np.ndarray | None = None,
    label: str | None = None,
) -> MotionClip:
    """Jointly sample all segments with per-frame conditioning.

    Classifier-free guidance mixes the conditional and unconditional
    predictions as uncond + scale * (cond - uncond); scale 0 therefore
    reproduces unconditional sampling exactly. Deterministic per rng_seed.
    """
    schedule = schedule or NoiseSchedule.linear()
    if guidance_scale < 0:
        raise ValidationError("guidance_scale must be >= 0")
    assignment.warn_if_over_cap()
    cond = assignment.condition_map(denoiser.embedder())
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    feats_norm = _reverse_diffusion(cond, denoiser, schedule, guidance_scale, rng, hook)
    return _finish_clip(feats_norm, assignment, denoiser, start_root, label)


def sample_prefix_mode(
    assignment: ConditionAssignment,
    denoiser_prefix: Denoiser,
    schedule: NoiseSchedule | None = None,
    guidance_scale: float = DEFAULT_GUIDANCE_SCALE,
    rng_seed: int = 0,
    hook: SamplingHook | None = None,
    start_root: np.ndarray | None = None,
    label: str | None = None,
) -> MotionClip:
    """Single-condition baseline: only the first segment's text is honored."""
    schedule = schedule or NoiseSchedule.linear()
    if guidance_scale < 0:
        raise ValidationError("guidance_scale must be >= 0")
    assignment.warn_if_over_cap()
    cond = assignment.prefix_map(denoiser_prefix.embedder())
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    feats_norm = _reverse_diffusion(
        cond, denoiser_prefix, schedule, guidance_scale, rng, hook
    )
    return _finish_clip(feats_norm, assignment, denoiser_prefix, start_root, label)
