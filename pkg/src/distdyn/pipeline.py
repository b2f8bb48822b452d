"""Stage runners behind the ``distdyn`` subcommands.

Each runner loads inputs from an :class:`AnalysisConfig`, writes its CSV files
into ``config.out`` and returns a :class:`RunReport`; ``finish`` then writes the
manifest.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .conditioning import (ConditionedSeries, joint_distribution, ratio_condition,
                           relative_capital_intensity, relative_income, spatial_condition)
from .config import AnalysisConfig
from .density import default_grid, kde_1d, silverman_bandwidth
from .dynamics import conditional_kernel, ergodic_distribution, net_transition_probability
from .emissions import deflate, estimate_co2, intensity
from .errors import ConfigError, DegenerateSample, MissingData
from .panel import (PanelDataset, RelativeSeries, coefficient_of_variation, regional_ratio,
                    relative_series, transition_pairs)

log = logging.getLogger(__name__)

REAL_GDP = "real_gdp"
CO2 = "co2"
MODE_STYLES = {"none": "solid", "gdp": "dash", "population": "dot"}
CONDITIONERS = ("space", "income", "capital")


@dataclass
class RunReport:
    command: str
    config: AnalysisConfig
    outputs: list = field(default_factory=list)
    overlays: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    converged: bool = True

    def add(self, *paths):
        self.outputs.extend(Path(p) for p in paths)


# Input assembly -------------------------------------------------------------------

def emissions_table(cfg: AnalysisConfig, panel: PanelDataset) -> dict:
    """CO2, real GDP and intensity arrays built from fuel consumption."""
    co2 = estimate_co2(io.read_consumption(cfg.consumption), io.read_factors(cfg.factors))
    gdp = panel.get(cfg.gdp)
    nominal = {(e, t): gdp[i, j] for i, e in enumerate(panel.entities)
               for j, t in enumerate(panel.years)}
    if cfg.deflator is not None:
        base = cfg.base_year if cfg.base_year is not None else panel.years[0]
        real = deflate(nominal, io.read_deflator(cfg.deflator), base)
    else:
        real = nominal
    ci = intensity(co2, real)
    out = {}
    for name, table in ((CO2, co2), (REAL_GDP, real), (cfg.intensity, ci)):
        arr = np.empty((len(panel.entities), len(panel.years)))
        for i, e in enumerate(panel.entities):
            for j, t in enumerate(panel.years):
                if (e, t) not in table:
                    raise MissingData(e, t, name)
                arr[i, j] = table[(e, t)]
        out[name] = arr
    return out


def load_panel(cfg: AnalysisConfig) -> PanelDataset:
    cfg.validate()
    regions = io.read_regions(cfg.regions) if cfg.regions else None
    adjacency = io.read_adjacency(cfg.adjacency) if cfg.adjacency else None
    panel = io.read_panel(cfg.panel, regions, adjacency)
    if cfg.consumption is not None:
        for name, arr in emissions_table(cfg, panel).items():
            if name not in panel.values:
                panel = panel.with_variable(name, arr)
    if cfg.intensity not in panel.values:
        raise ConfigError(f"intensity variable {cfg.intensity!r} not in panel and no "
                          "consumption/factors files configured to build it")
    for start, end in cfg.periods:
        if start not in panel.years or end not in panel.years or end - start < cfg.tau:
            raise ConfigError(f"period {start}-{end} invalid for panel "
                              f"{panel.years[0]}-{panel.years[-1]} with tau={cfg.tau}")
    return panel


def gdp_variable(cfg: AnalysisConfig, panel: PanelDataset) -> str:
    return REAL_GDP if REAL_GDP in panel.values else cfg.gdp


def weight_variable(cfg, panel, mode: str):
    return {"none": None, "gdp": gdp_variable(cfg, panel), "population": cfg.population}[mode]


def periods(cfg: AnalysisConfig, panel: PanelDataset) -> list:
    return list(cfg.periods) or [(panel.years[0], panel.years[-1])]


def _rcei(cfg, panel) -> dict:
    return {m: relative_series(panel, cfg.intensity, weight_variable(cfg, panel, m))
            for m in cfg.weights}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def finish(report: RunReport) -> Path:
    """Write ``overlays.json`` and ``manifest.json`` for the run."""
    out = Path(report.config.out)
    if report.overlays:
        report.add(io.write_json(out / "overlays.json", {"groups": report.overlays}))
    files = sorted({p.relative_to(out).as_posix() for p in report.outputs})
    manifest = {
        "command": report.command,
        "config": report.config.echo(),
        "converged": report.converged,
        "notes": report.notes,
        "outputs": [{"file": f, "sha256": _sha256(out / f)} for f in files],
    }
    return io.write_json(out / "manifest.json", manifest)


# Stages ---------------------------------------------------------------------------

def run_emissions(cfg: AnalysisConfig) -> RunReport:
    if cfg.consumption is None:
        raise ConfigError("emissions needs consumption and factors files")
    cfg.validate()
    panel = io.read_panel(cfg.panel)
    table = emissions_table(cfg, panel)
    rows = [(e, t, name, table[name][i, j])
            for i, e in enumerate(panel.entities) for j, t in enumerate(panel.years)
            for name in (CO2, REAL_GDP, cfg.intensity)]
    report = RunReport("emissions", cfg)
    report.add(io.write_csv(Path(cfg.out) / "emissions.csv",
                            ["entity", "year", "variable", "value"], rows))
    return report


def run_dispersion(cfg: AnalysisConfig) -> RunReport:
    if cfg.regions is None:
        raise ConfigError("dispersion needs a regions file for the interregional ratios")
    panel = load_panel(cfg)
    west = regional_ratio(panel, cfg.intensity, cfg.west, cfg.east)
    central = regional_ratio(panel, cfg.intensity, cfg.central, cfg.east)
    rows = [(t, coefficient_of_variation(panel, cfg.intensity, t), west[t], central[t])
            for t in panel.years]
    report = RunReport("dispersion", cfg)
    path = io.write_csv(Path(cfg.out) / "dispersion.csv",
                        ["year", "cv", "west_east", "central_east"], rows)
    report.add(path)
    if cfg.svg:
        years = [r[0] for r in rows]
        report.add(io.svg_lines(Path(cfg.out) / "dispersion.svg", [
            ("cv", years, [r[1] for r in rows]),
            ("west/east", years, [r[2] for r in rows]),
            ("central/east", years, [r[3] for r in rows])], "dispersion"))
    return report


def run_snapshot_densities(cfg: AnalysisConfig, years=None) -> RunReport:
    panel = load_panel(cfg)
    years = list(years or cfg.snapshot_years or (panel.years[0], panel.years[-1]))
    for t in years:
        panel.year_index(t)
    series = _rcei(cfg, panel)
    report = RunReport("snapshot", cfg)
    out = Path(cfg.out)
    for t in years:
        j = panel.year_index(t)
        col = series[cfg.weights[0]].values[:, j]
        hs = {m: silverman_bandwidth(col, None if s.weights is None else s.weights[:, j])
              for m, s in series.items()}
        grid = default_grid(col, max(hs.values()), cfg.grid_size)
        curves = []
        for m, s in series.items():
            d = kde_1d(col, None if s.weights is None else s.weights[:, j], grid, hs[m])
            report.add(io.write_density(out / f"density_{t}_{m}.csv", d))
            curves.append((m, grid.points, d.density))
        report.overlays.append(_group(f"density_{t}", [f"density_{t}_{m}.csv" for m in series],
                                      [MODE_STYLES[m] for m in series]))
        if cfg.svg:
            report.add(io.svg_lines(out / f"density_{t}.svg", curves, f"RCEI density {t}"))
    return report


def _group(plot, files, styles):
    return {"plot": plot, "files": list(files), "styles": list(styles)}


def _period_grid(cfg, series_by_mode, period):
    pairs = {m: transition_pairs(s, cfg.tau, period) for m, s in series_by_mode.items()}
    first = next(iter(pairs.values()))
    h = max(max(silverman_bandwidth(p.x, p.w), silverman_bandwidth(p.y, p.w))
            for p in pairs.values())
    return pairs, default_grid(np.concatenate([first.x, first.y]), h, cfg.grid_size)


def dynamics_set(cfg: AnalysisConfig, series_by_mode: dict, period, report: RunReport,
                 suffix: str = "") -> dict:
    """Kernel, NTP and ergodic files for one period across weight modes."""
    out = Path(cfg.out)
    label = f"{period[0]}-{period[1]}"
    pairs, grid = _period_grid(cfg, series_by_mode, period)
    names = {}
    ergodics, ntps = [], []
    for m, p in pairs.items():
        stem = f"{label}_{m}{suffix}"
        kernel = conditional_kernel(p, grid, grid)
        ntp = net_transition_probability(kernel)
        erg = ergodic_distribution(kernel, cfg.tolerance, cfg.max_iter)
        if not erg.converged:
            report.converged = False
            report.notes.append(f"ergodic_{stem}: not converged (residual {erg.residual:.3e})")
        report.add(io.write_kernel(out / f"kernel_{stem}.csv", kernel),
                   io.write_ntp(out / f"ntp_{stem}.csv", ntp),
                   *io.write_ergodic(out / f"ergodic_{stem}.csv", erg))
        names[m] = stem
        ergodics.append((m, grid.points, erg.distribution.density))
        ntps.append((m, grid.points, ntp.p))
        if cfg.svg:
            report.add(io.svg_heatmap(out / f"kernel_{stem}.svg", grid.points, grid.points,
                                      kernel.g, f"stochastic kernel {stem}"))
    if cfg.svg:
        report.add(io.svg_lines(out / f"ergodic_{label}{suffix}.svg", ergodics,
                                f"ergodic {label}{suffix}"),
                   io.svg_lines(out / f"ntp_{label}{suffix}.svg", ntps, f"NTP {label}{suffix}"))
    return names


def run_dynamics(cfg: AnalysisConfig) -> RunReport:
    panel = load_panel(cfg)
    series = _rcei(cfg, panel)
    report = RunReport("dynamics", cfg)
    _unconditional(cfg, panel, series, report)
    return report


def _unconditional(cfg, panel, series, report):
    styles = [MODE_STYLES[m] for m in series]
    stems = {}
    for period in periods(cfg, panel):
        names = dynamics_set(cfg, series, period, report)
        label = f"{period[0]}-{period[1]}"
        for kind in ("ergodic", "ntp"):
            report.overlays.append(_group(f"{kind}_{label}",
                                          [f"{kind}_{n}.csv" for n in names.values()], styles))
        stems[period] = names
    return stems


def conditioner_series(cfg: AnalysisConfig, panel: PanelDataset, conditioner: str,
                       base: RelativeSeries):
    """Return ``(conditioned, joint_x, joint_y)``: the pre-filtered series and the pair
    of series whose joint density is plotted."""
    if conditioner == "space":
        cond = spatial_condition(base, panel.adjacency)
        idx = {e: i for i, e in enumerate(base.entities)}
        cov = np.full_like(base.values, np.nan)
        for i, e in enumerate(base.entities):
            nbrs = sorted(idx[n] for n in panel.adjacency.get(e, ()))
            if nbrs:
                cov[i] = base.values[nbrs].mean(axis=0)
        covariate = RelativeSeries("neighbours", base.entities, base.years, cov)
        masked = RelativeSeries(base.variable, base.entities, base.years,
                                np.where(np.isnan(cov), np.nan, base.values))
        return cond, masked, covariate
    if conditioner == "income":
        if cfg.income is not None:
            covariate = relative_series(panel, cfg.income)
        else:
            covariate = relative_income(panel, gdp_variable(cfg, panel), cfg.population)
    elif conditioner == "capital":
        covariate = relative_capital_intensity(panel, cfg.capital, gdp_variable(cfg, panel))
    else:
        raise ConfigError(f"unknown conditioner {conditioner!r}; choose from {CONDITIONERS}")
    return ratio_condition(base, covariate), base, covariate


def _check_conditioner_inputs(cfg, panel, conditioner):
    if conditioner == "space":
        if panel.adjacency is None:
            raise ConfigError("space conditioning needs an adjacency file")
        return
    need = {"income": [cfg.income] if cfg.income else [gdp_variable(cfg, panel), cfg.population],
            "capital": [cfg.capital, gdp_variable(cfg, panel)]}.get(conditioner)
    if need is None:
        raise ConfigError(f"unknown conditioner {conditioner!r}; choose from {CONDITIONERS}")
    missing = [v for v in need if v not in panel.values]
    if missing:
        raise ConfigError(f"{conditioner} conditioning needs panel variable(s) {missing}")


def run_conditional(cfg: AnalysisConfig, conditioner: str) -> RunReport:
    if conditioner == "space" and cfg.adjacency is None:
        raise ConfigError("space conditioning needs an adjacency file")
    panel = load_panel(cfg)
    _check_conditioner_inputs(cfg, panel, conditioner)
    series = _rcei(cfg, panel)
    report = RunReport(f"conditional {conditioner}", cfg)
    out = Path(cfg.out)

    base = series[cfg.weights[0]]
    cond, joint_x, joint_y = conditioner_series(cfg, panel, conditioner, base)
    try:
        joint = joint_distribution(joint_x, joint_y, grid_size=cfg.grid_size)
    except DegenerateSample as exc:
        report.notes.append(f"joint_{conditioner}: skipped, covariate has no spread ({exc})")
    else:
        report.add(io.write_joint(out / f"joint_{conditioner}.csv", joint))
        if cfg.svg:
            report.add(io.svg_heatmap(out / f"joint_{conditioner}.svg", joint.x_grid.points,
                                      joint.y_grid.points, joint.density,
                                      f"joint RCEI / {conditioner}"))

    conditioned = {m: ConditionedSeries(cond.variable, cond.entities, cond.years, cond.values,
                                        s.weights, cond.conditioner, cond.excluded)
                   for m, s in series.items()}
    report.add(io.write_csv(out / f"conditioned_{conditioner}.csv",
                            ["entity", "year", "value", "excluded_reason"], cond.rows()))
    suffix = f"_{conditioner}"
    uncond = _unconditional(cfg, panel, series, report)
    for period in periods(cfg, panel):
        names = dynamics_set(cfg, conditioned, period, report, suffix)
        for m, stem in names.items():
            for kind in ("ergodic", "ntp"):
                report.overlays.append(_group(
                    f"{kind}_{stem}",
                    [f"{kind}_{stem}.csv", f"{kind}_{uncond[period][m]}.csv"],
                    ["solid", "dash"]))
    return report
