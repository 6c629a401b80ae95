"""Central-difference derivatives and the stabilized gradient unit vector.

Interior points use second-order centered stencils; boundary rows and
columns fall back to first-order one-sided differences (regional tiles
are not periodic). The unit vector is stabilized by a small epsilon in
the denominator so it stays finite where the gradient vanishes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import TooSmallGridError

DEFAULT_EPS = 1e-6


@dataclass
class GradientField:
    """Per-pixel gradient components, magnitude, and stabilized direction."""

    gx: np.ndarray
    gy: np.ndarray
    mag: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    eps: float


def _diff_axis(values, spacing, axis):
    """Centered differences along one axis, one-sided first order at the ends."""
    v = np.moveaxis(values, axis, 1)
    d = np.empty_like(v)
    d[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * spacing)
    d[:, 0] = (v[:, 1] - v[:, 0]) / spacing
    d[:, -1] = (v[:, -1] - v[:, -2]) / spacing
    return np.moveaxis(d, 1, axis)


def gradient_central(grid, eps=DEFAULT_EPS):
    """Gradient, magnitude, and stabilized unit direction of a scalar grid."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if grid.height < 2 or grid.width < 2:
        raise TooSmallGridError(
            f"gradient needs at least 2x2, got {grid.height}x{grid.width}")
    gx = _diff_axis(grid.values, grid.dx, axis=1)
    gy = _diff_axis(grid.values, grid.dy, axis=0)
    mag = np.sqrt(gx * gx + gy * gy)
    denom = mag + eps
    return GradientField(gx=gx, gy=gy, mag=mag, ux=gx / denom, uy=gy / denom, eps=eps)


def gradient_magnitude(grid):
    """Convenience accessor for the gradient magnitude only."""
    return gradient_central(grid, DEFAULT_EPS).mag
