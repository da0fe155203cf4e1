"""Per-frame feature representation the diffusion model operates on.

A frame becomes [root velocity (3), joint offsets from root (3J)], so the
feature dimension is 3 + 3 * joint_count. Velocity is the root displacement
from the previous frame (zero at frame 0). Working in velocity space keeps a
segment's label visible in every frame's features, which is what lets a
frame-local denoiser follow per-frame conditions.
"""

from __future__ import annotations

import numpy as np

from ..core import MotionClip, Skeleton, ValidationError


def feature_dim(skeleton: Skeleton) -> int:
    return 3 + 3 * skeleton.joint_count


def clip_to_features(clip: MotionClip) -> np.ndarray:
    """(n_frames, 3 + 3J) features: root velocity plus root-relative offsets."""
    root = clip.frames[:, clip.skeleton.root_index, :]
    vel = np.zeros_like(root)
    vel[1:] = root[1:] - root[:-1]
    offsets = clip.frames - root[:, None, :]
    return np.concatenate([vel, offsets.reshape(clip.n_frames, -1)], axis=1)


def features_to_frames(
    feats: np.ndarray, skeleton: Skeleton, start_root: np.ndarray | None = None
) -> np.ndarray:
    """Integrate features back into (n_frames, J, 3) joint positions."""
    feats = np.asarray(feats, dtype=float)
    expected = feature_dim(skeleton)
    if feats.ndim != 2 or feats.shape[1] != expected:
        raise ValidationError(
            f"features must be (n, {expected}) for this skeleton, got {feats.shape}"
        )
    n = feats.shape[0]
    vel = feats[:, :3]
    offsets = feats[:, 3:].reshape(n, skeleton.joint_count, 3)
    start = np.zeros(3) if start_root is None else np.asarray(start_root, dtype=float)
    root = start + np.cumsum(vel, axis=0)
    frames = root[:, None, :] + offsets
    # the root joint's own offset channel is redundant; pin it to the root
    frames[:, skeleton.root_index, :] = root
    return frames


def dataset_stats(features: np.ndarray, floor: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension mean/std for normalization; std floored to stay invertible."""
    mean = features.mean(axis=0)
    std = np.maximum(features.std(axis=0), floor)
    return mean, std
