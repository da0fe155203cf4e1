"""Temporal smoothing of stitched motion clips.

At each junction of two clips, the last L frames of the preceding clip and
the first L frames of the following clip are fused by a shifted-sigmoid
weighted mix, then re-expanded from L back to 2L frames by linear
interpolation. Total sequence length is therefore preserved: 2L frames go in,
2L frames come out per junction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MotionClip, TransitionSegment, ValidationError, concat

DEFAULT_BLEND_LEN = 15  # 0.75 s at 20 fps


@dataclass(frozen=True)
class BlendConfig:
    """Transition window length in frames (the blend consumes L per side)."""

    L: int = DEFAULT_BLEND_LEN

    def __post_init__(self) -> None:
        if self.L < 2:
            raise ValidationError(f"blend length must be >= 2, got {self.L}")


def blend_weight(t: int, L: int) -> float:
    """Mixing weight alpha(t) = 1 / (1 + exp(-(t - L/2))) for 0 <= t < L.

    Strictly increasing in t, and symmetric about the window center:
    alpha(t) + alpha(L - t) == 1.
    """
    if L < 2:
        raise ValidationError(f"blend length must be >= 2, got {L}")
    if not 0 <= t < L:
        raise ValidationError(f"frame index {t} outside [0, {L})")
    return 1.0 / (1.0 + math.exp(-(t - L / 2.0)))


def blend_transition(
    K_prev: TransitionSegment, K_next: TransitionSegment, cfg: BlendConfig
) -> np.ndarray:
    """Mix the tail of the preceding clip into the head of the following one.

    Frame t of the result is alpha(t) * K_next[t] + (1 - alpha(t)) * K_prev[t].
    Because alpha grows with t, early output frames follow the preceding
    motion and late frames follow the following motion.
    """
    if K_prev.length != cfg.L or K_next.length != cfg.L:
        raise ValidationError(
            f"segments must both have length {cfg.L}, "
            f"got {K_prev.length} and {K_next.length}"
        )
    if K_prev.frames.shape != K_next.frames.shape:
        raise ValidationError(
            f"segment shapes differ: {K_prev.frames.shape} vs {K_next.frames.shape}"
        )
    alpha = np.array([blend_weight(t, cfg.L) for t in range(cfg.L)])
    alpha = alpha[:, None, None]
    return alpha * K_next.frames + (1.0 - alpha) * K_prev.frames


def upsample_linear(K_tilde: np.ndarray) -> np.ndarray:
    """Stretch L fused frames back to 2L by linear interpolation.

    Output index t maps to source position x = (L-1)/(2L-1) * t, interpolated
    between floor(x) and ceil(x). The map sends t=0 to 0 and t=2L-1 to L-1
    exactly, so both endpoints are preserved. When x lands on an integer the
    two interpolation nodes coincide and the frame is returned directly.
    """
    K_tilde = np.asarray(K_tilde, dtype=float)
    L = K_tilde.shape[0]
    if L < 2:
        raise ValidationError(f"need at least 2 frames to upsample, got {L}")
    scale = (L - 1) / (2 * L - 1)
    out = np.empty((2 * L,) + K_tilde.shape[1:], dtype=float)
    for t in range(2 * L):
        x = scale * t
        x0 = math.floor(x)
        x1 = math.ceil(x)
        if x1 == x0:
            out[t] = K_tilde[x0]
        else:
            out[t] = K_tilde[x0] + (K_tilde[x1] - K_tilde[x0]) / (x1 - x0) * (x - x0)
    return out


def smooth_junction(tail: np.ndarray, head: np.ndarray, cfg: BlendConfig) -> np.ndarray:
    """Blend + upsample one junction: (2L in) -> (2L out)."""
    fused = blend_transition(TransitionSegment(tail), TransitionSegment(head), cfg)
    return upsample_linear(fused)


def stitch(clips: Sequence[MotionClip], cfg: BlendConfig | None = None) -> MotionClip:
    """Concatenate clips with temporally smoothed junctions.

    For every interior boundary the last L frames of the preceding clip and
    the first L frames of the following clip are replaced by the smoothed 2L
    window, so the output length equals the plain concatenation length.
    Boundary metadata (the original junction indices) is preserved.
    """
    cfg = cfg or BlendConfig()
    clips = list(clips)
    if not clips:
        raise ValidationError("stitch needs at least one clip")
    if len(clips) == 1:
        return clips[0]
    naive = concat(clips)  # validates skeleton/fps agreement
    L = cfg.L
    for i, clip in enumerate(clips):
        if clip.n_frames < 2 * L:
            raise ValidationError(
                f"clip {i} ({clip.label!r}) has {clip.n_frames} frames but "
                f"stitching with L={L} needs at least {2 * L}"
            )
    pieces: list[np.ndarray] = []
    for i, clip in enumerate(clips):
        start = 0 if i == 0 else L
        stop = clip.n_frames if i == len(clips) - 1 else clip.n_frames - L
        pieces.append(clip.frames[start:stop])
        if i < len(clips) - 1:
            tail = clip.frames[-L:]
            head = clips[i + 1].frames[:L]
            pieces.append(smooth_junction(tail, head, cfg))
    frames = np.concatenate(pieces, axis=0)
    return MotionClip(
        skeleton=naive.skeleton,
        fps=naive.fps,
        frames=frames,
        label=naive.label,
        boundaries=naive.boundaries,
    )
