"""Toy denoising-diffusion motion generator with per-frame text conditioning."""

from .datasets import make_dataset, rest_pose, two_class_dataset, walker_dataset
from .embedding import (
    HARD_FRAME_CAP,
    QUALITY_FRAME_CAP,
    ConditionAssignment,
    QualityCapWarning,
    TextEmbedder,
    timestep_embedding,
)
from .features import clip_to_features, feature_dim, features_to_frames
from .model import Denoiser, MotionDataset, TrainConfig, train
from .sampling import DEFAULT_GUIDANCE_SCALE, sample, sample_prefix_mode
from .schedule import NoiseSchedule, diffuse, forward_noise

__all__ = [
    "ConditionAssignment",
    "DEFAULT_GUIDANCE_SCALE",
    "Denoiser",
    "HARD_FRAME_CAP",
    "MotionDataset",
    "NoiseSchedule",
    "QUALITY_FRAME_CAP",
    "QualityCapWarning",
    "TextEmbedder",
    "TrainConfig",
    "clip_to_features",
    "diffuse",
    "feature_dim",
    "features_to_frames",
    "forward_noise",
    "make_dataset",
    "rest_pose",
    "sample",
    "sample_prefix_mode",
    "timestep_embedding",
    "train",
    "two_class_dataset",
    "walker_dataset",
]
