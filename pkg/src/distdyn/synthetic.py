"""Seeded synthetic panels for tests, demos and the bundled fixture.

Nothing here is real data: emission factors and all series are invented so the
pipeline can run end to end.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import io
from .emissions import CO2_PER_CARBON
from .panel import PanelDataset

FUELS = ("coal", "crude_oil", "coke", "gasoline", "kerosene", "diesel_oil", "fuel_oil",
         "natural_gas")

# (cf, cc, cof) placeholders, not IPCC values
SYNTHETIC_FACTORS = {
    "coal": (0.02, 26.0, 0.94),
    "crude_oil": (0.042, 20.0, 0.98),
    "coke": (0.028, 29.0, 0.93),
    "gasoline": (0.043, 18.9, 0.98),
    "kerosene": (0.043, 19.5, 0.98),
    "diesel_oil": (0.042, 20.2, 0.98),
    "fuel_oil": (0.041, 21.1, 0.98),
    "natural_gas": (0.389, 15.3, 0.99),
}

CLUB_LEVELS = (0.3, 1.0, 2.0, 3.5)
CLUB_SIZES = (15, 9, 3, 3)


def club_levels(n_years: int = 20, seed: int = 0, swaps_per_year: int = 3,
                noise: float = 0.05, persistence: float = 0.7) -> np.ndarray:
    """``(30, n_years)`` values clustered at 0.3, 1, 2 and 3.5.

    Group sizes make the cross-sectional mean 1, and each year a few entities
    in different clubs swap places, so composition (and the yearly mean) is
    preserved while the clubs still communicate.  Within-club deviations follow
    a stationary AR(1).
    """
    rng = np.random.default_rng(seed)
    levels = np.asarray(CLUB_LEVELS)
    club = np.repeat(np.arange(len(levels)), CLUB_SIZES)
    n = club.size
    innov = noise * np.sqrt(1 - persistence ** 2)
    dev = rng.normal(0.0, noise, n)
    out = np.empty((n, n_years))
    out[:, 0] = levels[club] + dev
    for t in range(1, n_years):
        for _ in range(swaps_per_year):
            while True:
                a, b = rng.integers(0, n, 2)
                if club[a] != club[b]:
                    break
            club[a], club[b] = club[b], club[a]
        dev = persistence * dev + rng.normal(0.0, innov, n)
        out[:, t] = levels[club] + dev
    return out


def three_club_panel(seed: int = 0, start: int = 1995, n_years: int = 20) -> PanelDataset:
    vals = club_levels(n_years, seed)
    entities = [f"p{i:02d}" for i in range(vals.shape[0])]
    return PanelDataset(entities, range(start, start + n_years), {"intensity": vals})


def make_panel(seed: int = 0, start: int = 1995, n_years: int = 20) -> dict:
    """All raw inputs for a 30-entity fixture as plain Python structures."""
    rng = np.random.default_rng(seed)
    years = list(range(start, start + n_years))
    ci = club_levels(n_years, seed)
    n = ci.shape[0]
    entities = [f"p{i:02d}" for i in range(n)]
    regions = {e: ("east", "central", "west")[i % 3] for i, e in enumerate(entities)}
    # ring plus a few chords; p29 left isolated to exercise exclusion
    adjacency = {e: set() for e in entities}
    for i in range(n - 1):
        j = (i + 1) % (n - 1)
        k = (i + 7) % (n - 1)
        adjacency[entities[i]].add(entities[j])
        adjacency[entities[j]].add(entities[i])
        if i % 4 == 0:
            adjacency[entities[i]].add(entities[k])
            adjacency[entities[k]].add(entities[i])

    growth = np.cumprod(1 + rng.uniform(0.05, 0.12, (n, n_years)), axis=1)
    real_gdp = rng.uniform(50, 500, (n, 1)) * growth
    deflator = 100 * np.cumprod(np.r_[1.0, 1 + rng.uniform(0.01, 0.05, n_years - 1)])
    nominal = real_gdp * deflator / deflator[0]
    population = rng.uniform(5, 80, (n, 1)) * np.cumprod(
        1 + rng.uniform(0.0, 0.01, (n, n_years)), axis=1)
    capital = real_gdp * rng.uniform(1.5, 3.5, (n, 1)) * np.exp(rng.normal(0, 0.05, (n, n_years)))

    co2 = ci * real_gdp
    shares = rng.dirichlet(np.ones(len(FUELS)), n)
    consumption = {}
    for i, e in enumerate(entities):
        for j, t in enumerate(years):
            for k, fuel in enumerate(FUELS):
                cf, cc, cof = SYNTHETIC_FACTORS[fuel]
                consumption[(e, t, fuel)] = co2[i, j] * shares[i, k] / (cf * cc * cof * CO2_PER_CARBON)
    return {
        "entities": entities, "years": years, "regions": regions, "adjacency": adjacency,
        "gdp": nominal, "population": population, "capital": capital,
        "deflator": {("*", t): deflator[j] for j, t in enumerate(years)},
        "consumption": consumption,
    }


CONFIG_TEMPLATE = """\
[data]
panel = panel.csv
factors = factors.csv
consumption = consumption.csv
deflator = deflator.csv
regions = regions.csv
adjacency = adjacency.csv

[variables]
intensity = intensity
gdp = gdp
population = population
capital = capital

[analysis]
weights = none, gdp, population
tau = 1
periods = {full}, {first}, {second}
snapshot_years = {y0}, {ymid}, {y1}
grid_size = {grid_size}
tolerance = 1e-10
max_iter = 100000

[output]
dir = out
"""


def write_fixture(directory, seed: int = 0, grid_size: int = 128) -> Path:
    """Write panel/factor/consumption/deflator/region/adjacency CSVs plus ``config.ini``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    raw = make_panel(seed)
    ents, years = raw["entities"], raw["years"]
    rows = [(e, t, var, raw[var][i, j])
            for var in ("gdp", "population", "capital")
            for i, e in enumerate(ents) for j, t in enumerate(years)]
    io.write_csv(d / "panel.csv", ["entity", "year", "variable", "value"], rows)
    io.write_csv(d / "factors.csv", ["fuel", "cf", "cc", "cof"],
                 [(f, *SYNTHETIC_FACTORS[f]) for f in FUELS])
    io.write_csv(d / "consumption.csv", ["entity", "year", "fuel", "quantity"],
                 [(e, t, f, q) for (e, t, f), q in raw["consumption"].items()])
    io.write_csv(d / "deflator.csv", ["entity", "year", "index"],
                 [(e, t, v) for (e, t), v in raw["deflator"].items()])
    io.write_csv(d / "regions.csv", ["entity", "region"], raw["regions"].items())
    io.write_csv(d / "adjacency.csv", ["entity", "neighbor"],
                 [(a, b) for a in ents for b in sorted(raw["adjacency"][a])])
    mid = years[len(years) // 2]
    cfg = CONFIG_TEMPLATE.format(full=f"{years[0]}-{years[-1]}", first=f"{years[0]}-{mid}",
                                 second=f"{mid}-{years[-1]}", y0=years[0], ymid=mid,
                                 y1=years[-1], grid_size=grid_size)
    path = d / "config.ini"
    path.write_text(cfg, encoding="utf-8")
    return path
