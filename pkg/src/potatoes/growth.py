"""Recurrences and growth-rate fits over exact count series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class InsufficientData(ValueError):
    pass


class GrowthModel(str, Enum):
    EXPONENTIAL = "Exponential"
    POLYNOMIAL = "Polynomial"


@dataclass
class GrowthEstimate:
    model: GrowthModel
    parameter: float
    residual: float
    series: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "parameter": self.parameter,
            "residual": self.residual,
            "series": [[n, str(c)] for n, c in self.series],
        }


def eval_N(k: int) -> int:
    """Convex paths across a half-circle group of ``2**k + 1`` points.

    ``N(1) = 2`` and ``N(k) = N(k-1)**2 + 1``: a path either takes the chord
    or passes through the midpoint, picking a path on each side.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    value = 2
    for _ in range(k - 1):
        value = value * value + 1
    return value


def eval_potential_bound(k: int) -> int:
    from .certificates import potential_bound

    return potential_bound(k)


def _log(x: int) -> float:
    # math.log handles big ints without overflowing to float first.
    return math.log(x)


def fit_growth(series, model) -> GrowthEstimate:
    """Least-squares fit of ``ln(count)`` against ``n`` or ``ln(n)``.

    The residual is the root mean square deviation of the log counts.
    """
    model = GrowthModel(model)
    series = sorted((int(n), int(c)) for n, c in series)
    if len({n for n, _ in series}) < 2:
        raise InsufficientData("need at least two distinct sizes")
    if any(c < 1 for _, c in series) or any(n < 1 for n, _ in series):
        raise InsufficientData("sizes and counts must be positive")
    ys = np.array([_log(c) for _, c in series])
    if model is GrowthModel.EXPONENTIAL:
        xs = np.array([float(n) for n, _ in series])
    else:
        xs = np.array([math.log(n) for n, _ in series])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    param = math.exp(slope) if model is GrowthModel.EXPONENTIAL else float(slope)
    return GrowthEstimate(model, float(param), resid, series)
