"""Balanced entity x year panel, relative normalisation and transition pairs."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateYear, EmptyRegion, InsufficientData, InvalidYear, MissingData


@dataclass(frozen=True)
class PanelDataset:
    """Immutable panel store.

    ``values`` maps a variable name to an ``(n_entities, n_years)`` float array;
    absent cells are NaN and raise :class:`MissingData` when an analysis asks
    for them.
    """

    entities: tuple
    years: tuple
    values: Mapping[str, np.ndarray]
    regions: Mapping[str, str] | None = None
    adjacency: Mapping[str, frozenset] | None = None

    def __post_init__(self):
        years = tuple(int(y) for y in self.years)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "entities", tuple(self.entities))
        if len(years) == 0:
            raise InsufficientData("panel has no years")
        if any(b - a != 1 for a, b in zip(years, years[1:])):
            raise ValueError(f"years must be strictly increasing and consecutive, got {years}")
        if len(set(self.entities)) != len(self.entities):
            raise ValueError("duplicate entity identifiers")
        shape = (len(self.entities), len(years))
        frozen = {}
        for name, arr in self.values.items():
            arr = np.array(arr, dtype=float)
            if arr.shape != shape:
                raise ValueError(f"variable {name!r} has shape {arr.shape}, expected {shape}")
            arr.flags.writeable = False
            frozen[name] = arr
        object.__setattr__(self, "values", frozen)
        if self.adjacency is not None:
            object.__setattr__(self, "adjacency", symmetrize(self.adjacency, self.entities))

    @property
    def variables(self):
        return tuple(self.values)

    def year_index(self, year: int) -> int:
        try:
            return self.years.index(int(year))
        except ValueError:
            raise InvalidYear(f"year {year} outside panel {self.years[0]}-{self.years[-1]}") from None

    def get(self, variable: str) -> np.ndarray:
        """Full ``(n_entities, n_years)`` array; raises on any missing cell."""
        return self.get_block(variable, self.years[0], self.years[-1])

    def get_block(self, variable: str, start: int, end: int) -> np.ndarray:
        if variable not in self.values:
            raise MissingData(self.entities[0] if self.entities else None, start, variable)
        i0, i1 = self.year_index(start), self.year_index(end)
        block = self.values[variable][:, i0 : i1 + 1]
        bad = np.argwhere(np.isnan(block))
        if len(bad):
            e, t = bad[0]
            raise MissingData(self.entities[e], self.years[i0 + t], variable)
        return block

    def with_variable(self, name: str, arr) -> "PanelDataset":
        values = dict(self.values)
        values[name] = arr
        return PanelDataset(self.entities, self.years, values, self.regions, self.adjacency)


def symmetrize(adjacency: Mapping, entities: Sequence) -> dict:
    """Return a symmetric adjacency; warns when the input was not symmetric."""
    sym = {e: set() for e in entities}
    asymmetric = False
    for a, nbrs in adjacency.items():
        for b in nbrs:
            if a == b:
                continue
            if a not in sym or b not in sym:
                raise ValueError(f"adjacency references unknown entity in edge ({a!r}, {b!r})")
            if a not in adjacency.get(b, ()):
                asymmetric = True
            sym[a].add(b)
            sym[b].add(a)
    if asymmetric:
        warnings.warn("adjacency was asymmetric; symmetrised on load", stacklevel=3)
    return {e: frozenset(n) for e, n in sym.items()}


@dataclass
class RelativeSeries:
    """A variable normalised by its yearly cross-sectional mean.

    ``weights`` holds per-year shares (each column sums to one) or ``None``.
    NaN values mark cells dropped by a conditioning pre-filter.
    """

    variable: str
    entities: tuple
    years: tuple
    values: np.ndarray
    weights: np.ndarray | None = None

    def value(self, entity, year) -> float:
        return float(self.values[self.entities.index(entity), self.years.index(year)])

    def restrict(self, start: int, end: int) -> "RelativeSeries":
        i0, i1 = self.years.index(start), self.years.index(end)
        w = None if self.weights is None else self.weights[:, i0 : i1 + 1]
        return RelativeSeries(self.variable, self.entities, self.years[i0 : i1 + 1],
                              self.values[:, i0 : i1 + 1], w)


def _shares(raw: np.ndarray, years, variable) -> np.ndarray:
    if np.any(raw <= 0):
        e, t = np.argwhere(raw <= 0)[0]
        raise DegenerateYear(years[t], f"weight variable {variable!r} must be positive")
    shares = raw / raw.sum(axis=0, keepdims=True)
    # equal weights map to exactly 1/n so the weighted path matches the unweighted one
    equal = np.all(raw == raw[:1], axis=0)
    shares[:, equal] = 1.0 / raw.shape[0]
    return shares


def relative_series(panel: PanelDataset, variable: str,
                    weight_variable: str | None = None) -> RelativeSeries:
    """Divide ``variable`` by its unweighted yearly mean; optionally attach per-year shares."""
    raw = panel.get(variable)
    means = raw.mean(axis=0)
    for year, m in zip(panel.years, means):
        if not m > 0:
            raise DegenerateYear(year)
    weights = None
    if weight_variable is not None:
        weights = _shares(panel.get(weight_variable), panel.years, weight_variable)
    return RelativeSeries(variable, panel.entities, panel.years, raw / means, weights)


def coefficient_of_variation(panel: PanelDataset, variable: str, year: int) -> float:
    col = panel.get_block(variable, year, year)[:, 0]
    if col.size < 2:
        raise InsufficientData(f"coefficient of variation needs >= 2 entities, got {col.size}")
    mu = col.mean()
    if not mu > 0:
        raise DegenerateYear(year)
    return float(col.std(ddof=1) / mu)


def regional_ratio(panel: PanelDataset, variable: str, numerator_region: str,
                   denominator_region: str) -> dict:
    """Year -> mean(variable | numerator region) / mean(variable | denominator region)."""
    if not panel.regions:
        raise EmptyRegion("panel has no region labels")
    arr = panel.get(variable)

    def members(label):
        idx = [i for i, e in enumerate(panel.entities) if panel.regions.get(e) == label]
        if not idx:
            raise EmptyRegion(f"no entities in region {label!r}")
        return idx

    num = arr[members(numerator_region)].mean(axis=0)
    den = arr[members(denominator_region)].mean(axis=0)
    out = {}
    for year, a, b in zip(panel.years, num, den):
        if not b > 0:
            raise DegenerateYear(year, f"region {denominator_region!r} mean <= 0")
        out[year] = float(a / b)
    return out


@dataclass
class TransitionPairs:
    tau: int
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    sources: list = field(default_factory=list)

    def __len__(self):
        return len(self.x)


def transition_pairs(series: RelativeSeries, tau: int, year_range=None) -> TransitionPairs:
    """Pool ``(value(i, t), value(i, t + tau))`` over entities and base years.

    Pair weights are the base-year shares renormalised over the pooled set.
    Cells that are NaN at either end (excluded by conditioning) are skipped.
    """
    tau = int(tau)
    if tau < 1:
        raise InsufficientData(f"lag must be >= 1, got {tau}")
    start, end = year_range if year_range is not None else (series.years[0], series.years[-1])
    if end - start < tau:
        raise InsufficientData(f"window {start}-{end} shorter than lag {tau}")
    if start not in series.years or end not in series.years:
        raise InvalidYear(f"range {start}-{end} outside series years")
    i0 = series.years.index(start)
    n_base = end - start - tau + 1
    n_ent = len(series.entities)
    if series.weights is None:
        base_w = np.full((n_ent, n_base), 1.0 / n_ent)
    else:
        base_w = series.weights[:, i0 : i0 + n_base]
    xs = series.values[:, i0 : i0 + n_base]
    ys = series.values[:, i0 + tau : i0 + tau + n_base]
    # row-major over base years then entities keeps source order stable
    x, y, w = xs.T.ravel(), ys.T.ravel(), base_w.T.ravel()
    keep = ~(np.isnan(x) | np.isnan(y))
    sources = [(e, series.years[i0 + t]) for t in range(n_base) for e in series.entities]
    sources = [s for s, k in zip(sources, keep) if k]
    x, y, w = x[keep], y[keep], w[keep]
    if x.size == 0:
        raise InsufficientData("no transition pairs in window")
    return TransitionPairs(tau, x, y, w / w.sum(), sources)
