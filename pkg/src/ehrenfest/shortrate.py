"""Short-rate model: affine map of the chain onto a bounded rate grid.

The rate process is R_t = h * X_t + r_min with h = (r_max - r_min) / N, so R
lives on the grid {r_min, r_min + h, ..., r_max} and inherits the chain's
mean reversion:

    E[R_t]   -> p * r_max + (1 - p) * r_min,
    Var[R_t] -> (r_max - r_min)^2 p (1 - p) / N.

The degenerate grid r_max = r_min (h = 0) is allowed and makes the rate
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chain import EhrenfestParams, conditional_mean, conditional_variance

__all__ = [
    "ShortRateModel",
    "OffGridRateError",
    "rate_to_state",
    "snap_rate",
    "rate_mean",
    "rate_variance",
    "mean_reversion_level",
    "stationary_rate_variance",
]

# Acceptable distance from an integer for (r - r_min) / h.
_GRID_TOL = 1e-9


class OffGridRateError(ValueError):
    """A rate was requested that does not sit on the model's grid."""

    def __init__(self, rate: float, nearest_state: int, nearest_rate: float):
        self.rate = rate
        self.nearest_state = nearest_state
        self.nearest_rate = nearest_rate
        super().__init__(
            f"rate {rate!r} is not on the model grid; nearest grid point is "
            f"{nearest_rate!r} (state {nearest_state})"
        )


@dataclass(frozen=True)
class ShortRateModel:
    """Chain parameters plus the rate bounds [r_min, r_max]."""

    chain: EhrenfestParams
    r_min: float
    r_max: float

    def __post_init__(self) -> None:
        if self.r_max < self.r_min:
            raise ValueError(
                f"r_max must be >= r_min, got r_min={self.r_min}, r_max={self.r_max}"
            )

    @property
    def N(self) -> int:
        return self.chain.N

    @property
    def h(self) -> float:
        """Grid step (0 for the degenerate deterministic model)."""
        return (self.r_max - self.r_min) / self.chain.N

    @cached_property
    def grid(self) -> np.ndarray:
        g = self.r_min + self.h * np.arange(self.chain.N + 1)
        g.flags.writeable = False
        return g


def rate_to_state(r: float, model: ShortRateModel) -> int:
    """Grid state k with r = r_min + h k; raises OffGridRateError otherwise."""
    if model.h == 0.0:
        if abs(r - model.r_min) <= _GRID_TOL * max(1.0, abs(model.r_min)):
            return 0
        raise OffGridRateError(r, 0, model.r_min)
    kf = (r - model.r_min) / model.h
    k = int(round(kf))
    if abs(kf - k) > _GRID_TOL or not 0 <= k <= model.N:
        knear = min(max(k, 0), model.N)
        raise OffGridRateError(r, knear, float(model.grid[knear]))
    return k


def snap_rate(r: float, model: ShortRateModel) -> tuple[int, float]:
    """Nearest grid state and its rate (clipped to the grid ends)."""
    if model.h == 0.0:
        return 0, model.r_min
    k = int(round((r - model.r_min) / model.h))
    k = min(max(k, 0), model.N)
    return k, float(model.grid[k])


def rate_mean(r0: float, t: float, model: ShortRateModel) -> float:
    """E[R_t | R_0 = r0] for r0 on the grid."""
    k = rate_to_state(r0, model)
    return model.h * conditional_mean(k, t, model.chain) + model.r_min


def rate_variance(r0: float, t: float, model: ShortRateModel) -> float:
    """Var[R_t | R_0 = r0] for r0 on the grid."""
    k = rate_to_state(r0, model)
    return model.h**2 * conditional_variance(k, t, model.chain)


def mean_reversion_level(model: ShortRateModel) -> float:
    """Long-run mean p * r_max + (1 - p) * r_min."""
    p = model.chain.p
    return p * model.r_max + (1.0 - p) * model.r_min


def stationary_rate_variance(model: ShortRateModel) -> float:
    """Long-run variance (r_max - r_min)^2 p (1 - p) / N."""
    p = model.chain.p
    return (model.r_max - model.r_min) ** 2 * p * (1.0 - p) / model.N
