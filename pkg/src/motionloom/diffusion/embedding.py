"""Deterministic text embeddings and per-frame condition assignment.

The embedder is a hash table, not a language model: each text hashes (sha256)
to a seed that draws a fixed unit vector. Identical texts always embed
identically, across processes and platforms, which is what the reproducibility
contract of the toy generator needs. A real text encoder can be swapped in by
implementing the same embed() surface.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import ValidationError

QUALITY_FRAME_CAP = 196
HARD_FRAME_CAP = 512


class QualityCapWarning(UserWarning):
    """Raised when a generation request exceeds the quality frame cap."""


@dataclass(frozen=True)
class TextEmbedder:
    """text -> deterministic unit vector of the configured dimension."""

    dim: int = 16

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValidationError("embedding dim must be positive")

    def embed(self, text: str) -> np.ndarray:
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "big")
        rng = np.random.Generator(np.random.PCG64(seed))
        vec = rng.standard_normal(self.dim)
        return vec / np.linalg.norm(vec)

    @property
    def null_embedding(self) -> np.ndarray:
        return np.zeros(self.dim)


def timestep_embedding(t: int, T: int, dim: int) -> np.ndarray:
    """Sinusoidal embedding of the normalized diffusion step t/T."""
    if dim % 2 != 0:
        raise ValidationError("timestep embedding dim must be even")
    half = dim // 2
    freqs = np.exp(np.linspace(0.0, np.log(1000.0), half))
    angles = (t / T) * freqs
    return np.concatenate([np.sin(angles), np.cos(angles)])


@dataclass(frozen=True)
class ConditionAssignment:
    """Ordered (text, [a, b)) segments covering [0, total_frames) exactly."""

    segments: tuple[tuple[str, tuple[int, int]], ...]
    embedding_dim: int = 16

    def __post_init__(self) -> None:
        if self.embedding_dim < 1:
            raise ValidationError("embedding_dim must be positive")
        segs = tuple((str(text), (int(a), int(b))) for text, (a, b) in self.segments)
        if not segs:
            raise ValidationError("assignment needs at least one segment")
        cursor = 0
        for text, (a, b) in segs:
            if not text:
                raise ValidationError("segment text must be non-empty")
            if a != cursor:
                raise ValidationError(
                    f"segment ranges must be contiguous from 0; got start {a}, expected {cursor}"
                )
            if b <= a:
                raise ValidationError(f"segment range [{a}, {b}) is empty")
            cursor = b
        object.__setattr__(self, "segments", segs)

    @property
    def total_frames(self) -> int:
        return self.segments[-1][1][1]

    @property
    def exceeds_quality_cap(self) -> bool:
        return self.total_frames > QUALITY_FRAME_CAP

    @property
    def breakpoints(self) -> tuple[int, ...]:
        """First frame of every segment after the first."""
        return tuple(rng[0] for _, rng in self.segments[1:])

    @classmethod
    def from_lengths(
        cls, parts: Sequence[tuple[str, int]], embedding_dim: int = 16
    ) -> "ConditionAssignment":
        segments = []
        start = 0
        for text, n in parts:
            segments.append((text, (start, start + int(n))))
            start += int(n)
        return cls(segments=tuple(segments), embedding_dim=embedding_dim)

    def condition_map(self, embedder: TextEmbedder) -> np.ndarray:
        """(total_frames, dim) matrix: the segment embedding at every frame."""
        if embedder.dim != self.embedding_dim:
            raise ValidationError(
                f"embedder dim {embedder.dim} != assignment dim {self.embedding_dim}"
            )
        out = np.zeros((self.total_frames, self.embedding_dim))
        for text, (a, b) in self.segments:
            out[a:b] = embedder.embed(text)
        return out

    def prefix_map(self, embedder: TextEmbedder) -> np.ndarray:
        """Single-condition baseline: the first segment's text everywhere.

        This mirrors conditioning a whole sequence with one prefix token, so
        only the first action's text can be honored.
        """
        if embedder.dim != self.embedding_dim:
            raise ValidationError(
                f"embedder dim {embedder.dim} != assignment dim {self.embedding_dim}"
            )
        first_text = self.segments[0][0]
        return np.tile(embedder.embed(first_text), (self.total_frames, 1))

    def warn_if_over_cap(self) -> None:
        if self.total_frames > HARD_FRAME_CAP:
            raise ValidationError(
                f"{self.total_frames} frames exceeds the hard cap of {HARD_FRAME_CAP}"
            )
        if self.exceeds_quality_cap:
            warnings.warn(
                f"{self.total_frames} frames exceeds {QUALITY_FRAME_CAP}; "
                "generation quality degrades beyond that length",
                QualityCapWarning,
                stacklevel=3,
            )
