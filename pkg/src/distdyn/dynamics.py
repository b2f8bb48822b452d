"""Stochastic kernel, ergodic distribution and net transition probability."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .density import DensityGrid, Grid1D, kde_1d, kde_2d, silverman_bandwidth
from .errors import DegenerateKernel, DegenerateSample, GridMismatch, NotConverged
from .panel import TransitionPairs

log = logging.getLogger(__name__)

DEFAULT_FLOOR_RATIO = 1e-4


@dataclass(frozen=True)
class ConditionalKernel:
    """``g[a, b]`` approximates g(y_b | x_a); invalid rows are all zero."""

    x_grid: Grid1D
    y_grid: Grid1D
    g: np.ndarray
    valid: np.ndarray
    marginal_floor: float = float("nan")
    bandwidths: tuple = (float("nan"), float("nan"))

    @classmethod
    def from_rows(cls, x_grid: Grid1D, y_grid: Grid1D, rows, valid=None) -> "ConditionalKernel":
        """Build a kernel from arbitrary nonnegative rows, renormalising each valid row."""
        rows = np.array(rows, dtype=float)
        if rows.shape != (len(x_grid), len(y_grid)):
            raise ValueError(f"rows shape {rows.shape} does not match the grids")
        if np.any(rows < 0):
            raise ValueError("kernel rows must be nonnegative")
        mass = y_grid.integrate(rows, axis=1)
        valid = np.ones(len(x_grid), bool) if valid is None else np.asarray(valid, bool).copy()
        valid &= mass > 0
        if not valid.any():
            raise DegenerateKernel("no row carries mass")
        g = np.zeros_like(rows)
        g[valid] = rows[valid] / mass[valid, None]
        return cls(x_grid, y_grid, g, valid)

    def row_means(self) -> np.ndarray:
        y = self.y_grid.points
        out = np.full(len(self.x_grid), np.nan)
        out[self.valid] = self.y_grid.integrate(self.g[self.valid] * y, axis=1)
        return out


def conditional_kernel(pairs: TransitionPairs, x_grid: Grid1D, y_grid: Grid1D,
                       bandwidths=None, floor_ratio: float = DEFAULT_FLOOR_RATIO
                       ) -> ConditionalKernel:
    """Joint KDE divided by the x-marginal KDE, thin rows masked, valid rows renormalised."""
    if np.unique(pairs.x).size < 2:
        raise DegenerateKernel("need at least two distinct base values")
    if bandwidths is None:
        try:
            bandwidths = (silverman_bandwidth(pairs.x, pairs.w),
                          silverman_bandwidth(pairs.y, pairs.w))
        except DegenerateSample as exc:
            raise DegenerateKernel(str(exc)) from exc
    h_x, h_y = (float(b) for b in bandwidths)
    joint = kde_2d(pairs.x, pairs.y, pairs.w, x_grid, y_grid, h_x, h_y)
    marginal = kde_1d(pairs.x, pairs.w, x_grid, h_x).density
    floor = floor_ratio * marginal.max()
    valid = marginal >= floor
    g = np.zeros_like(joint.density)
    g[valid] = joint.density[valid] / marginal[valid, None]
    mass = y_grid.integrate(g, axis=1)
    valid &= mass > 0
    if not valid.any():
        raise DegenerateKernel("every row fell below the marginal floor")
    g[valid] /= mass[valid, None]
    g[~valid] = 0.0
    return ConditionalKernel(x_grid, y_grid, g, valid, float(floor), (h_x, h_y))


@dataclass(frozen=True)
class ErgodicResult:
    distribution: DensityGrid
    iterations: int
    residual: float
    converged: bool

    def mean(self) -> float:
        d = self.distribution
        return float(d.grid.integrate(d.density * d.grid.points))


def transition_matrix(kernel: ConditionalKernel) -> np.ndarray:
    """Row-stochastic quadrature matrix ``P[a, b] = g(y_b | x_a) * q_b`` (invalid rows zero)."""
    return kernel.g * kernel.y_grid.trapezoid_weights()[None, :]


def apply_kernel(kernel: ConditionalKernel, f: np.ndarray) -> np.ndarray:
    """One step of ``f -> integral g(y|x) f(x) dx`` over valid rows, renormalised."""
    q = kernel.x_grid.trapezoid_weights()
    mass = q * f
    mass[~kernel.valid] = 0.0
    nxt = mass @ kernel.g
    total = kernel.y_grid.integrate(nxt)
    if not total > 0:
        raise DegenerateKernel("iterate lost all mass")
    return nxt / total


def ergodic_distribution(kernel: ConditionalKernel, tolerance: float = 1e-10,
                         max_iter: int = 100_000, start=None, strict: bool = False
                         ) -> ErgodicResult:
    """Power iteration to the fixed point of the kernel, from a uniform start by default.

    Stops once the trapezoid L1 change between iterates drops below ``tolerance``.
    A non-converged solve returns the last iterate with ``converged=False``,
    or raises :class:`NotConverged` when ``strict``.
    """
    if kernel.x_grid != kernel.y_grid:
        raise GridMismatch("ergodic iteration needs identical x and y grids")
    grid = kernel.x_grid
    if start is None:
        f = np.full(len(grid), 1.0 / (grid.points[-1] - grid.points[0]))
    else:
        f = np.array(start, dtype=float)
        f = f / grid.integrate(f)
    residual = np.inf
    it = 0
    while it < max_iter:
        it += 1
        nxt = apply_kernel(kernel, f)
        residual = float(grid.integrate(np.abs(nxt - f)))
        f = nxt
        if residual < tolerance:
            break
    converged = residual < tolerance
    result = ErgodicResult(DensityGrid(grid, f), it, residual, converged)
    if not converged:
        log.warning("ergodic iteration stopped at %d iterations, residual %.3e", it, residual)
        if strict:
            raise NotConverged(result)
    return result


@dataclass(frozen=True)
class NTPCurve:
    x_grid: Grid1D
    p: np.ndarray
    valid: np.ndarray
    upper: np.ndarray
    lower: np.ndarray


def _mass_below(y: np.ndarray, row: np.ndarray, cum: np.ndarray, x: float) -> float:
    if x <= y[0]:
        return 0.0
    if x >= y[-1]:
        return float(cum[-1])
    k = int(np.searchsorted(y, x, side="right")) - 1
    t = (x - y[k]) / (y[k + 1] - y[k])
    gx = row[k] + t * (row[k + 1] - row[k])
    return float(cum[k] + 0.5 * (x - y[k]) * (row[k] + gx))


def net_transition_probability(kernel: ConditionalKernel) -> NTPCurve:
    """Mass above the current value minus mass below it, row by row.

    The grid cell containing ``z = x`` is split using the linear interpolant of
    the row, so the split integrates that cell exactly for piecewise-linear rows.
    """
    y = kernel.y_grid.points
    step = kernel.y_grid.spacing
    n = len(kernel.x_grid)
    upper = np.full(n, np.nan)
    lower = np.full(n, np.nan)
    for a in np.flatnonzero(kernel.valid):
        row = kernel.g[a]
        cum = np.concatenate(([0.0], np.cumsum(0.5 * step * (row[1:] + row[:-1]))))
        lo = _mass_below(y, row, cum, kernel.x_grid.points[a])
        lower[a] = lo
        upper[a] = cum[-1] - lo
    return NTPCurve(kernel.x_grid, upper - lower, kernel.valid.copy(), upper, lower)
