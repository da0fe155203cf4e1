"""Forward-process noise schedule for the toy denoising diffusion model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ValidationError

DEFAULT_T = 100
# Classic 1000-step linear range (1e-4 .. 0.02) scaled by 1000/T so that a
# 100-step schedule still ends in near-pure noise (alpha_bar_T << 1).
DEFAULT_BETA_START = 1e-3
DEFAULT_BETA_END = 0.2


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """Strictly increasing betas with cumulative signal decay alpha_bar.

    alpha_bar[t] = prod_{s<=t} (1 - beta_s), indexed 1..T via the at() helper.
    Construction enforces 0 < beta_1 < ... < beta_T < 1 and alpha_bar_T < 0.05
    so that the final diffusion step is close to pure noise.
    """

    betas: np.ndarray

    def __post_init__(self) -> None:
        betas = np.array(self.betas, dtype=float, copy=True)
        if betas.ndim != 1 or betas.shape[0] < 1:
            raise ValidationError("betas must be a non-empty 1-D array")
        if not np.all(np.isfinite(betas)):
            raise ValidationError("betas must be finite")
        if betas[0] <= 0 or betas[-1] >= 1:
            raise ValidationError("betas must lie strictly inside (0, 1)")
        if not np.all(np.diff(betas) > 0):
            raise ValidationError("betas must be strictly increasing")
        alpha_bar = np.cumprod(1.0 - betas)
        if alpha_bar[-1] >= 0.05:
            raise ValidationError(
                f"alpha_bar_T = {alpha_bar[-1]:.4f} >= 0.05; the schedule does "
                "not reach near-pure noise"
            )
        betas.setflags(write=False)
        alpha_bar.setflags(write=False)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "_alpha_bar", alpha_bar)

    @property
    def T(self) -> int:
        return int(self.betas.shape[0])

    def beta(self, t: int) -> float:
        self._check_step(t)
        return float(self.betas[t - 1])

    def alpha_bar(self, t: int) -> float:
        """Cumulative product of (1 - beta) up to step t; alpha_bar(0) == 1."""
        if t == 0:
            return 1.0
        self._check_step(t)
        return float(self._alpha_bar[t - 1])

    def _check_step(self, t: int) -> None:
        if not 1 <= t <= self.T:
            raise ValidationError(f"diffusion step {t} outside [1, {self.T}]")

    @classmethod
    def linear(
        cls,
        T: int = DEFAULT_T,
        beta_start: float = DEFAULT_BETA_START,
        beta_end: float = DEFAULT_BETA_END,
    ) -> "NoiseSchedule":
        return cls(betas=np.linspace(beta_start, beta_end, T))


def diffuse(x0: np.ndarray, alpha_bar_t: float, eps: np.ndarray) -> np.ndarray:
    """Closed-form forward step: sqrt(ab) * x0 + sqrt(1 - ab) * eps."""
    return np.sqrt(alpha_bar_t) * x0 + np.sqrt(1.0 - alpha_bar_t) * eps


def forward_noise(
    x0: np.ndarray,
    t: int,
    schedule: NoiseSchedule,
    rng_seed: int,
    eps: np.ndarray | None = None,
) -> np.ndarray:
    """Draw x_t from q(x_t | x_0) with a seeded generator.

    eps may be supplied explicitly (e.g. zeros) to exercise the noiseless
    branch; otherwise it is drawn standard-normal from PCG64(rng_seed).
    """
    x0 = np.asarray(x0, dtype=float)
    if not 1 <= t <= schedule.T:
        raise ValidationError(f"diffusion step {t} outside [1, {schedule.T}]")
    ab = schedule.alpha_bar(t)
    if eps is None:
        rng = np.random.Generator(np.random.PCG64(rng_seed))
        eps = rng.standard_normal(x0.shape)
    else:
        eps = np.asarray(eps, dtype=float)
        if eps.shape != x0.shape:
            raise ValidationError(f"eps shape {eps.shape} != x0 shape {x0.shape}")
    return diffuse(x0, ab, eps)
