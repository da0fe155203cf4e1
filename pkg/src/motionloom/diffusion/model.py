"""The trainable denoiser and its training loop.

The denoiser is frame-local: every frame row (noisy features ++ condition
embedding ++ timestep embedding) is mapped independently to a predicted clean
feature row. Conditioning therefore enters per frame, which is what allows a
single sampling pass to honor several different texts over different frame
ranges. Training is plain DDPM with the clean sample as the regression target
and classifier-free masking of the condition embedding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from ..core import (
    MotionClip,
    MotionFormatError,
    Skeleton,
    ValidationError,
    canonical_dumps,
    clip_from_dict,
    clip_to_dict,
)
from .embedding import TextEmbedder, timestep_embedding
from .features import clip_to_features, dataset_stats, feature_dim
from .network import AdamState, Params, adam_step, forward, init_params, loss_and_grads
from .schedule import NoiseSchedule


@dataclass(frozen=True)
class MotionDataset:
    """Labeled clips sharing one skeleton and frame rate."""

    clips: tuple[MotionClip, ...]

    def __post_init__(self) -> None:
        clips = tuple(self.clips)
        if not clips:
            raise ValidationError("dataset needs at least one clip")
        first = clips[0]
        for i, clip in enumerate(clips):
            if clip.skeleton != first.skeleton:
                raise ValidationError(f"clip {i} skeleton differs from clip 0")
            if clip.fps != first.fps:
                raise ValidationError(f"clip {i} fps differs from clip 0")
            if not clip.label:
                raise ValidationError(f"clip {i} has no label")
        object.__setattr__(self, "clips", clips)

    @property
    def skeleton(self) -> Skeleton:
        return self.clips[0].skeleton

    @property
    def fps(self) -> float:
        return self.clips[0].fps

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({c.label for c in self.clips}))

    def save(self, path: str | Path) -> None:
        payload = {"clips": [clip_to_dict(c) for c in self.clips]}
        Path(path).write_text(canonical_dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "MotionDataset":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(clips=tuple(clip_from_dict(c) for c in data["clips"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MotionFormatError(f"bad dataset file: {exc}") from exc


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 1500
    batch_size: int = 32
    lr: float = 3e-3
    hidden: tuple[int, ...] = (64, 64)
    embedding_dim: int = 16
    time_dim: int = 8
    mask_prob: float = 0.1  # classifier-free condition dropout
    seed: int = 0

    def __post_init__(self) -> None:
        if self.steps < 0 or self.batch_size < 1:
            raise ValidationError("steps must be >= 0 and batch_size >= 1")
        if not 0.0 <= self.mask_prob <= 1.0:
            raise ValidationError("mask_prob must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class Denoiser:
    """Immutable trained model: weights plus everything needed to sample."""

    params: tuple[tuple[np.ndarray, np.ndarray], ...]
    skeleton: Skeleton
    fps: float
    embedding_dim: int
    time_dim: int
    feature_mean: np.ndarray
    feature_std: np.ndarray
    default_start_root: np.ndarray
    initial_loss: float = float("nan")
    final_loss: float = float("nan")
    loss_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        frozen = []
        for W, b in self.params:
            W = np.array(W, dtype=float, copy=True)
            b = np.array(b, dtype=float, copy=True)
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValidationError("denoiser parameters must be finite")
            W.setflags(write=False)
            b.setflags(write=False)
            frozen.append((W, b))
        object.__setattr__(self, "params", tuple(frozen))
        for name in ("feature_mean", "feature_std", "default_start_root"):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        expected_in = self.feature_dim + self.embedding_dim + self.time_dim
        if self.params[0][0].shape[0] != expected_in:
            raise ValidationError(
                f"first layer expects {self.params[0][0].shape[0]} inputs, "
                f"model configuration implies {expected_in}"
            )
        if self.params[-1][0].shape[1] != self.feature_dim:
            raise ValidationError("output layer width must equal the feature dim")

    @property
    def feature_dim(self) -> int:
        return feature_dim(self.skeleton)

    @property
    def layer_dims(self) -> tuple[int, ...]:
        dims = [self.params[0][0].shape[0]]
        dims.extend(W.shape[1] for W, _ in self.params)
        return tuple(dims)

    def embedder(self) -> TextEmbedder:
        return TextEmbedder(self.embedding_dim)

    def predict(self, x_norm: np.ndarray, cond: np.ndarray, t: int, T: int) -> np.ndarray:
        """Predicted clean (normalized) features for every frame row."""
        if x_norm.shape[1] != self.feature_dim:
            raise ValidationError(
                f"features have dim {x_norm.shape[1]}, model expects {self.feature_dim}"
            )
        if cond.shape != (x_norm.shape[0], self.embedding_dim):
            raise ValidationError(
                f"condition rows {cond.shape} do not match frames "
                f"({x_norm.shape[0]}, {self.embedding_dim})"
            )
        t_emb = np.tile(timestep_embedding(t, T, self.time_dim), (x_norm.shape[0], 1))
        return forward(list(self.params), np.concatenate([x_norm, cond, t_emb], axis=1))

    def normalize(self, feats: np.ndarray) -> np.ndarray:
        return (feats - self.feature_mean) / self.feature_std

    def denormalize(self, feats_norm: np.ndarray) -> np.ndarray:
        return feats_norm * self.feature_std + self.feature_mean

    # -- checkpoint file -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "layer_dims": list(self.layer_dims),
            "weights": [{"W": W.tolist(), "b": b.tolist()} for W, b in self.params],
            "skeleton": self.skeleton.to_dict(),
            "fps": self.fps,
            "embedding_dim": self.embedding_dim,
            "time_dim": self.time_dim,
            "feature_mean": self.feature_mean.tolist(),
            "feature_std": self.feature_std.tolist(),
            "default_start_root": self.default_start_root.tolist(),
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
            "loss_history": list(self.loss_history),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(canonical_dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Denoiser":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            params = tuple(
                (np.array(w["W"], dtype=float), np.array(w["b"], dtype=float))
                for w in data["weights"]
            )
            return cls(
                params=params,
                skeleton=Skeleton.from_dict(data["skeleton"]),
                fps=float(data["fps"]),
                embedding_dim=int(data["embedding_dim"]),
                time_dim=int(data["time_dim"]),
                feature_mean=np.array(data["feature_mean"], dtype=float),
                feature_std=np.array(data["feature_std"], dtype=float),
                default_start_root=np.array(data["default_start_root"], dtype=float),
                initial_loss=float(data["initial_loss"]),
                final_loss=float(data["final_loss"]),
                loss_history=tuple(float(v) for v in data["loss_history"]),
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MotionFormatError(f"bad checkpoint file: {exc}") from exc


def _training_rows(
    dataset: MotionDataset, embedder: TextEmbedder
) -> tuple[np.ndarray, np.ndarray]:
    """Stack every frame of every clip with its clip's condition embedding."""
    feats = []
    conds = []
    for clip in dataset.clips:
        f = clip_to_features(clip)
        feats.append(f)
        conds.append(np.tile(embedder.embed(clip.label), (f.shape[0], 1)))
    return np.concatenate(feats, axis=0), np.concatenate(conds, axis=0)


def _eval_loss(
    params: Params,
    x0n: np.ndarray,
    cond: np.ndarray,
    schedule: NoiseSchedule,
    time_dim: int,
    seed: int,
) -> float:
    """Deterministic held-out style loss: fixed probe rows, timesteps, noise."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n = min(512, x0n.shape[0])
    idx = rng.choice(x0n.shape[0], size=n, replace=False)
    ts = rng.integers(1, schedule.T + 1, size=n)
    eps = rng.standard_normal((n, x0n.shape[1]))
    ab = np.array([schedule.alpha_bar(int(t)) for t in ts])
    x_t = np.sqrt(ab)[:, None] * x0n[idx] + np.sqrt(1 - ab)[:, None] * eps
    t_emb = _timestep_rows(ts, schedule.T, time_dim)
    pred = forward(params, np.concatenate([x_t, cond[idx], t_emb], axis=1))
    diff = pred - x0n[idx]
    return float(np.mean(diff * diff))


def _timestep_rows(ts: np.ndarray, T: int, dim: int) -> np.ndarray:
    half = dim // 2
    freqs = np.exp(np.linspace(0.0, np.log(1000.0), half))
    angles = (ts[:, None] / T) * freqs[None, :]
    return np.concatenate([np.sin(angles), np.cos(angles)], axis=1)


def train(
    dataset: MotionDataset,
    schedule: NoiseSchedule | None = None,
    config: TrainConfig | None = None,
) -> Denoiser:
    """Train a denoiser on the dataset; deterministic for a given config.seed.

    With config.steps == 0 the freshly initialized parameters are returned
    unchanged. Each example's condition embedding is replaced by the null
    (zero) embedding with probability config.mask_prob, enabling
    classifier-free guidance at sampling time.
    """
    schedule = schedule or NoiseSchedule.linear()
    config = config or TrainConfig()
    embedder = TextEmbedder(config.embedding_dim)
    x0, cond_all = _training_rows(dataset, embedder)
    mean, std = dataset_stats(x0)
    x0n = (x0 - mean) / std

    d = x0.shape[1]
    layer_dims = [d + config.embedding_dim + config.time_dim, *config.hidden, d]
    rng = np.random.Generator(np.random.PCG64(config.seed))
    params = init_params(layer_dims, rng)

    eval_seed = config.seed + 987654321
    initial_loss = _eval_loss(params, x0n, cond_all, schedule, config.time_dim, eval_seed)

    history: list[float] = []
    adam = AdamState.for_params(params)
    n_rows = x0n.shape[0]
    for _ in range(config.steps):
        idx = rng.integers(0, n_rows, size=config.batch_size)
        ts = rng.integers(1, schedule.T + 1, size=config.batch_size)
        eps = rng.standard_normal((config.batch_size, d))
        mask = rng.random(config.batch_size) < config.mask_prob
        ab = np.array([schedule.alpha_bar(int(t)) for t in ts])
        x_t = np.sqrt(ab)[:, None] * x0n[idx] + np.sqrt(1 - ab)[:, None] * eps
        cond = cond_all[idx].copy()
        cond[mask] = 0.0
        t_emb = _timestep_rows(ts, schedule.T, config.time_dim)
        batch_in = np.concatenate([x_t, cond, t_emb], axis=1)
        loss, grads = loss_and_grads(params, batch_in, x0n[idx])
        if not np.isfinite(loss):
            raise ValidationError(f"training loss became non-finite at step {len(history)}")
        params = adam_step(params, grads, adam, config.lr)
        history.append(loss)

    final_loss = _eval_loss(params, x0n, cond_all, schedule, config.time_dim, eval_seed)
    start_root = np.mean(
        [c.frames[0, c.skeleton.root_index] for c in dataset.clips], axis=0
    )
    return Denoiser(
        params=tuple(params),
        skeleton=dataset.skeleton,
        fps=dataset.fps,
        embedding_dim=config.embedding_dim,
        time_dim=config.time_dim,
        feature_mean=mean,
        feature_std=std,
        default_start_root=start_root,
        initial_loss=initial_loss,
        final_loss=final_loss,
        loss_history=tuple(history),
    )
