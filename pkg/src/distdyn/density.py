"""Weighted Gaussian kernel density estimation in one and two dimensions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import map_rows
from .errors import DegenerateSample, InsufficientData, InvalidWeights

SQRT_2PI = math.sqrt(2.0 * math.pi)
DEFAULT_GRID_SIZE = 512


@dataclass(frozen=True)
class Grid1D:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 16:
            raise ValueError("grid needs at least 16 points")
        diffs = np.diff(pts)
        if np.any(diffs <= 0):
            raise ValueError("grid points must be strictly increasing")
        step = (pts[-1] - pts[0]) / (pts.size - 1)
        scale = max(np.abs(pts).max(), step)
        if np.max(np.abs(diffs - step)) > 1e-12 * scale * 8:
            raise ValueError("grid spacing is not uniform")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def span(cls, lo: float, hi: float, n: int = DEFAULT_GRID_SIZE) -> "Grid1D":
        return cls(np.linspace(lo, hi, n))

    @property
    def spacing(self) -> float:
        return float((self.points[-1] - self.points[0]) / (self.points.size - 1))

    def __len__(self):
        return self.points.size

    def trapezoid_weights(self) -> np.ndarray:
        q = np.full(self.points.size, self.spacing)
        q[0] = q[-1] = 0.5 * self.spacing
        return q

    def integrate(self, f: np.ndarray, axis: int = -1) -> np.ndarray:
        f = np.moveaxis(np.asarray(f, dtype=float), axis, -1)
        return np.sum(f * self.trapezoid_weights(), axis=-1)

    def __eq__(self, other):
        return isinstance(other, Grid1D) and np.array_equal(self.points, other.points)

    __hash__ = None


def default_grid(values, bandwidth: float, n: int = DEFAULT_GRID_SIZE,
                 clamp_zero: bool = True) -> Grid1D:
    """``n`` uniform points on ``[min - 4h, max + 4h]``, lower edge clamped at 0 if asked."""
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]
    lo = values.min() - 4.0 * bandwidth
    if clamp_zero:
        lo = max(0.0, lo)
    return Grid1D.span(lo, values.max() + 4.0 * bandwidth, n)


@dataclass(frozen=True)
class DensityGrid:
    grid: Grid1D
    density: np.ndarray

    def integral(self) -> float:
        return float(self.grid.integrate(self.density))

    @property
    def x(self):
        return self.grid.points


@dataclass(frozen=True)
class JointDensityGrid:
    x_grid: Grid1D
    y_grid: Grid1D
    density: np.ndarray  # shape (len(x_grid), len(y_grid))

    def integral(self) -> float:
        return float(self.x_grid.integrate(self.y_grid.integrate(self.density, axis=1)))


def _normalized_weights(sample: np.ndarray, weights) -> np.ndarray:
    if weights is None:
        return np.full(sample.size, 1.0 / sample.size)
    w = np.asarray(weights, dtype=float)
    if w.shape != sample.shape:
        raise InvalidWeights(f"weights shape {w.shape} != sample shape {sample.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidWeights("weights must be finite and nonnegative")
    total = w.sum()
    if not total > 0:
        raise InvalidWeights("weights sum to zero")
    if abs(total - 1.0) > 1e-9:
        w = w / total
    return w


def weighted_quantile(sample, weights, q):
    """Linear-interpolation quantiles generalised to weights.

    Order statistic ``k`` sits at plotting position
    ``(m_k - m_0) / (m_last - m_0)`` with ``m_k`` the midpoint of its cumulative
    weight; with equal weights this is ``k / (n - 1)``, numpy's default rule.
    """
    x = np.asarray(sample, dtype=float)
    w = _normalized_weights(x, weights)
    keep = w > 0
    x, w = x[keep], w[keep]
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    mid = np.cumsum(w) - 0.5 * w
    pos = (mid - mid[0]) / (mid[-1] - mid[0])
    return np.interp(q, pos, x)


def weighted_std(sample, weights=None) -> float:
    """Reliability-weighted standard deviation (divisor ``1 - sum w^2``; n-1 when uniform)."""
    x = np.asarray(sample, dtype=float)
    w = _normalized_weights(x, weights)
    mu = np.sum(w * x)
    denom = 1.0 - np.sum(w * w)
    if denom <= 0:
        return 0.0
    return float(math.sqrt(np.sum(w * (x - mu) ** 2) / denom))


def effective_sample_size(weights) -> float:
    w = np.asarray(weights, dtype=float)
    return float(1.0 / np.sum(w * w))


def silverman_bandwidth(sample, weights=None) -> float:
    """Rule-of-thumb ``0.9 * min(s, IQR / 1.34) * n_eff ** -0.2``.

    Falls back to ``s`` when the interquartile range collapses but the sample
    still has spread.
    """
    x = np.asarray(sample, dtype=float)
    if x.size < 2:
        raise DegenerateSample("bandwidth needs at least two observations")
    w = _normalized_weights(x, weights)
    if np.ptp(x[w > 0]) == 0:
        raise DegenerateSample("all sample values are identical")
    s = weighted_std(x, w)
    q1, q3 = weighted_quantile(x, w, [0.25, 0.75])
    iqr = q3 - q1
    # an IQR at rounding level counts as collapsed
    spread = min(s, iqr / 1.34) if iqr > 1e-9 * s else s
    if not spread > 0:
        raise DegenerateSample("sample has zero spread")
    return float(0.9 * spread * effective_sample_size(w) ** -0.2)


def _gauss(z):
    return np.exp(-0.5 * z * z) / SQRT_2PI


def kde_1d(sample, weights, grid: Grid1D, bandwidth: float) -> DensityGrid:
    """``f(g) = sum_i w_i K((g - x_i) / h) / h`` with a standard Gaussian ``K``."""
    x = np.asarray(sample, dtype=float)
    if x.size == 0:
        raise InsufficientData("empty sample")
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    w = _normalized_weights(x, weights)
    g = grid.points
    h = float(bandwidth)

    def block(a, b):
        k = _gauss((g[a:b, None] - x[None, :]) / h)
        return np.sum(k * w, axis=1) / h

    return DensityGrid(grid, map_rows(block, g.size, np.empty(g.size)))


def kde_2d(x, y, weights, x_grid: Grid1D, y_grid: Grid1D, h_x: float, h_y: float
           ) -> JointDensityGrid:
    """Product-Gaussian joint density of ``(x_i, y_i)`` pairs on ``x_grid x y_grid``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        raise InsufficientData("empty pair sample")
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    if not (h_x > 0 and h_y > 0):
        raise ValueError("bandwidths must be positive")
    w = _normalized_weights(x, weights)
    gx, gy = x_grid.points, y_grid.points
    ky = _gauss((gy[:, None] - y[None, :]) / h_y)  # (ny, n)
    scale = 1.0 / (h_x * h_y)

    def block(a, b):
        kx = _gauss((gx[a:b, None] - x[None, :]) / h_x) * w
        # einsum (no BLAS) keeps the per-cell reduction order fixed
        return np.einsum("ai,bi->ab", kx, ky) * scale

    out = np.empty((gx.size, gy.size))
    return JointDensityGrid(x_grid, y_grid, map_rows(block, gx.size, out))


def marginal_of_joint(joint: JointDensityGrid, axis: str = "x") -> DensityGrid:
    """Integrate the joint over the other axis with the trapezoid rule."""
    if axis == "x":
        return DensityGrid(joint.x_grid, joint.y_grid.integrate(joint.density, axis=1))
    if axis == "y":
        return DensityGrid(joint.y_grid, joint.x_grid.integrate(joint.density, axis=0))
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
