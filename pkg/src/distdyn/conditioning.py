"""Pre-filters that strip a conditioning variable out of a relative series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import (DEFAULT_GRID_SIZE, Grid1D, JointDensityGrid, default_grid, kde_2d,
                      silverman_bandwidth)
from .errors import DegenerateCovariate, DegenerateNeighborhood, MissingData
from .panel import PanelDataset, RelativeSeries, relative_series

NO_NEIGHBORS = "no neighbors"


@dataclass
class ConditionedSeries(RelativeSeries):
    """Relative series divided by a conditioner; excluded cells are NaN with a reason."""

    conditioner: str = ""
    excluded: dict = field(default_factory=dict)

    def rows(self):
        """``(entity, year, value, excluded_reason)`` tuples in entity-major order."""
        for i, e in enumerate(self.entities):
            for j, t in enumerate(self.years):
                v = self.values[i, j]
                yield e, t, (None if np.isnan(v) else float(v)), self.excluded.get((e, t), "")


def spatial_condition(series: RelativeSeries, adjacency) -> ConditionedSeries:
    """Each value divided by the unweighted mean of its strict neighbours in the same year."""
    if adjacency is None:
        raise ValueError("spatial conditioning needs an adjacency map")
    index = {e: i for i, e in enumerate(series.entities)}
    out = np.full_like(series.values, np.nan)
    excluded = {}
    for i, e in enumerate(series.entities):
        nbrs = sorted(index[n] for n in adjacency.get(e, ()) if n != e)
        if not nbrs:
            for t in series.years:
                excluded[(e, t)] = NO_NEIGHBORS
            continue
        nbr_mean = series.values[nbrs].mean(axis=0)
        for j, t in enumerate(series.years):
            if not nbr_mean[j] > 0:
                raise DegenerateNeighborhood(e, t)
        out[i] = series.values[i] / nbr_mean
    return ConditionedSeries(series.variable, series.entities, series.years, out,
                             series.weights, conditioner="space", excluded=excluded)


def ratio_condition(series: RelativeSeries, covariate: RelativeSeries) -> ConditionedSeries:
    """``series / covariate`` cell by cell (relative income, relative capital intensity, ...)."""
    if covariate.entities != series.entities or covariate.years != series.years:
        raise ValueError("series and covariate must share entities and years")
    defined = ~np.isnan(series.values)
    cov = covariate.values
    for i, j in np.argwhere(defined & np.isnan(cov)):
        raise MissingData(series.entities[i], series.years[j], covariate.variable)
    for i, j in np.argwhere(defined & ~(cov > 0)):
        raise DegenerateCovariate(series.entities[i], series.years[j])
    out = np.where(defined, series.values / np.where(defined, cov, 1.0), np.nan)
    excluded = dict(getattr(series, "excluded", {}))
    return ConditionedSeries(series.variable, series.entities, series.years, out,
                             series.weights, conditioner=covariate.variable, excluded=excluded)


def relative_income(panel: PanelDataset, gdp: str, population: str,
                    name: str = "income") -> RelativeSeries:
    """GDP per capita relative to its yearly mean."""
    per_capita = panel.get(gdp) / panel.get(population)
    return relative_series(panel.with_variable(name, per_capita), name)


def relative_capital_intensity(panel: PanelDataset, capital: str, gdp: str,
                               name: str = "capital") -> RelativeSeries:
    """Capital stock over real GDP, relative to its yearly mean."""
    ratio = panel.get(capital) / panel.get(gdp)
    return relative_series(panel.with_variable(name, ratio), name)


def joint_distribution(series_a: RelativeSeries, series_b: RelativeSeries,
                       x_grid: Grid1D | None = None, y_grid: Grid1D | None = None,
                       bandwidths=None, grid_size: int = DEFAULT_GRID_SIZE) -> JointDensityGrid:
    """Joint KDE of contemporaneous ``(a(i, t), b(i, t))`` pooled over all years, uniform weights."""
    if series_a.values.shape != series_b.values.shape:
        raise ValueError("series must share entities and years")
    na, nb = np.isnan(series_a.values), np.isnan(series_b.values)
    for i, j in np.argwhere(na ^ nb):
        var = series_a.variable if na[i, j] else series_b.variable
        raise MissingData(series_a.entities[i], series_a.years[j], var)
    keep = ~na
    a = series_a.values.T[keep.T]
    b = series_b.values.T[keep.T]
    if bandwidths is None:
        bandwidths = (silverman_bandwidth(a), silverman_bandwidth(b))
    h_a, h_b = bandwidths
    if x_grid is None:
        x_grid = default_grid(a, h_a, grid_size)
    if y_grid is None:
        y_grid = default_grid(b, h_b, grid_size)
    return kde_2d(a, b, None, x_grid, y_grid, h_a, h_b)
