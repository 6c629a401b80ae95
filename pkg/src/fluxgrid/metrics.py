"""Pixel-wise statistical metrics over a (prediction, truth) grid pair.

Degenerate denominators (constant fields) raise instead of returning
NaN so downstream reports never silently carry NaN.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVarianceError, DimensionMismatchError


@dataclass
class MetricReport:
    """The four statistical metrics plus optional physics-aware extras."""

    rmse: float
    r2: float
    pcc: float
    bias: float
    n: int
    l_flux: float | None = None
    l_spec: float | None = None


def _check_dims(pred, truth):
    if (pred.height, pred.width) != (truth.height, truth.width):
        raise DimensionMismatchError(
            f"pred is {pred.height}x{pred.width}, truth is {truth.height}x{truth.width}")


def rmse(pred, truth):
    """Root mean squared pixel error."""
    _check_dims(pred, truth)
    diff = pred.values - truth.values
    return float(np.sqrt(np.mean(diff * diff)))


def bias(pred, truth):
    """Mean signed pixel error."""
    _check_dims(pred, truth)
    return float(np.mean(pred.values - truth.values))


def r_squared(pred, truth):
    """Coefficient of determination against the truth mean; can be negative."""
    _check_dims(pred, truth)
    t = truth.values
    ss_res = np.sum((pred.values - t) ** 2)
    ss_tot = np.sum((t - t.mean()) ** 2)
    if ss_tot == 0:
        raise DegenerateVarianceError("truth field is constant; R^2 undefined")
    return float(1.0 - ss_res / ss_tot)


def pearson(pred, truth):
    """Pearson correlation, clamped to [-1, 1] against rounding."""
    _check_dims(pred, truth)
    p = pred.values - pred.values.mean()
    t = truth.values - truth.values.mean()
    denom_p = np.sqrt(np.sum(p * p))
    denom_t = np.sqrt(np.sum(t * t))
    if denom_p == 0:
        raise DegenerateVarianceError("pred field is constant; PCC undefined")
    if denom_t == 0:
        raise DegenerateVarianceError("truth field is constant; PCC undefined")
    r = np.sum(p * t) / (denom_p * denom_t)
    return float(np.clip(r, -1.0, 1.0))


def metric_report(pred, truth):
    """All four statistical metrics in one pass."""
    return MetricReport(
        rmse=rmse(pred, truth),
        r2=r_squared(pred, truth),
        pcc=pearson(pred, truth),
        bias=bias(pred, truth),
        n=pred.height * pred.width,
    )
