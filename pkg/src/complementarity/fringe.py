"""Sinusoidal fringe fitting."""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ArgumentError, FitError


@dataclass(frozen=True)
class FringeFit:
    visibility: float
    phase: float
    offset: float
    rms_residual: float


@dataclass(frozen=True)
class FringeRecord:
    """Detection probabilities over a theta scan together with the fitted fringe."""

    thetas: tuple
    p1: tuple
    fitted_visibility: float
    fitted_phase: float
    fitted_offset: float
    rms_residual: float

    def __post_init__(self):
        if any(not (-1e-12 <= p <= 1 + 1e-12) for p in self.p1):
            raise ArgumentError("fringe probabilities must lie in [0, 1]")
        if self.rms_residual < 0:
            raise ArgumentError("rms residual must be non-negative")

    @property
    def p0(self) -> tuple:
        return tuple(1.0 - p for p in self.p1)

    @classmethod
    def from_samples(cls, thetas, p1) -> "FringeRecord":
        fit = fit_fringe(thetas, p1)
        return cls(
            thetas=tuple(float(t) for t in thetas),
            p1=tuple(float(p) for p in p1),
            fitted_visibility=fit.visibility,
            fitted_phase=fit.phase,
            fitted_offset=fit.offset,
            rms_residual=fit.rms_residual,
        )


def fit_fringe(thetas, p1) -> FringeFit:
    """Least-squares fit of ``c + a cos(theta) + b sin(theta)``.

    The result is reported in the form ``c [1 + V cos(theta + phase)]``, so
    ``V = hypot(a, b) / c`` and ``phase = atan2(-b, a)``. The grid needs at
    least five distinct angles covering a full period; angles that coincide
    modulo 2pi are fine as long as the design matrix keeps full rank.
    """
    t = np.asarray(thetas, dtype=float).reshape(-1)
    y = np.asarray(p1, dtype=float).reshape(-1)
    if t.size != y.size:
        raise FitError(f"{t.size} angles but {y.size} samples")
    if np.unique(np.round(t, 12)).size < 5:
        raise FitError("need at least 5 distinct angles")
    # accepts both endpoint-inclusive and endpoint-exclusive uniform grids
    if np.ptp(t) * t.size / (t.size - 1) < 2 * math.pi - 1e-9:
        raise FitError("theta grid does not span a full period")
    design = np.column_stack([np.ones_like(t), np.cos(t), np.sin(t)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise FitError("rank-deficient fringe design matrix")
    c, a, b = coef
    if abs(c) < 1e-14:
        raise FitError("fitted fringe offset is zero")
    resid = y - design @ coef
    return FringeFit(
        visibility=float(math.hypot(a, b) / c),
        phase=float(math.atan2(-b, a)),
        offset=float(c),
        rms_residual=float(math.sqrt(np.mean(resid**2))),
    )
