"""Run configuration: INI file with sections, overridden by command-line flags."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

WEIGHT_MODES = ("none", "gdp", "population")
MIN_GRID_SIZE = 64


@dataclass
class AnalysisConfig:
    panel: Path | None = None
    factors: Path | None = None
    consumption: Path | None = None
    deflator: Path | None = None
    regions: Path | None = None
    adjacency: Path | None = None

    intensity: str = "intensity"
    gdp: str = "gdp"
    population: str = "population"
    capital: str = "capital"
    income: str | None = None  # per-capita income column; derived from gdp/population if unset

    weights: tuple = ("none",)
    tau: int = 1
    periods: tuple = ()          # ((start, end), ...); empty -> full panel
    snapshot_years: tuple = ()   # empty -> first and last panel year
    grid_size: int = 512
    tolerance: float = 1e-10
    max_iter: int = 100_000
    base_year: int | None = None  # deflation base; defaults to the first panel year

    west: str = "west"
    central: str = "central"
    east: str = "east"

    out: Path = Path("out")
    svg: bool = False

    def validate(self):
        if self.panel is None:
            raise ConfigError("no panel file configured")
        for name in ("panel", "factors", "consumption", "deflator", "regions", "adjacency"):
            p = getattr(self, name)
            if p is not None and not Path(p).exists():
                raise ConfigError(f"{name} file does not exist: {p}")
        if (self.factors is None) != (self.consumption is None):
            raise ConfigError("factors and consumption files must be given together")
        bad = [w for w in self.weights if w not in WEIGHT_MODES]
        if bad or not self.weights:
            raise ConfigError(f"weight modes must be drawn from {WEIGHT_MODES}, got {self.weights}")
        if self.grid_size < MIN_GRID_SIZE:
            raise ConfigError(f"grid size must be >= {MIN_GRID_SIZE}, got {self.grid_size}")
        if self.tau < 1:
            raise ConfigError(f"tau must be >= 1, got {self.tau}")
        if not self.tolerance > 0 or self.max_iter < 1:
            raise ConfigError("tolerance must be positive and max_iter >= 1")
        return self

    def echo(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Path):
                v = str(v)
            elif isinstance(v, tuple):
                v = [list(x) if isinstance(x, tuple) else x for x in v]
            out[f.name] = v
        return out


def _list(raw: str) -> list:
    return [s.strip() for s in raw.replace(";", ",").split(",") if s.strip()]


def parse_period(raw: str) -> tuple:
    try:
        a, b = raw.split("-")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"period must look like 1995-2014, got {raw!r}") from None


_SECTIONS = {
    "data": ("panel", "factors", "consumption", "deflator", "regions", "adjacency"),
    "variables": ("intensity", "gdp", "population", "capital", "income"),
    "analysis": ("weights", "tau", "periods", "snapshot_years", "grid_size", "tolerance",
                 "max_iter", "base_year"),
    "regions": ("west", "central", "east"),
    "output": ("out", "svg"),
}


def _coerce(key: str, raw: str, base: Path):
    if key in _SECTIONS["data"] or key == "out":
        p = Path(raw)
        return p if p.is_absolute() else base / p
    if key == "weights":
        return tuple(_list(raw))
    if key == "periods":
        return tuple(parse_period(p) for p in _list(raw))
    if key == "snapshot_years":
        return tuple(int(y) for y in _list(raw))
    if key in ("tau", "grid_size", "max_iter", "base_year"):
        return int(raw)
    if key == "tolerance":
        return float(raw)
    if key == "svg":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return raw.strip()


def load_config(path=None, **overrides) -> AnalysisConfig:
    """File values over defaults, then non-``None`` overrides over file values."""
    values = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser()
        parser.read(path, encoding="utf-8")
        base = path.parent
        for section in parser.sections():
            allowed = _SECTIONS.get(section)
            if allowed is None:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser[section].items():
                if key == "dir" and section == "output":
                    key = "out"
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                values[key] = _coerce(key, raw, base)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return AnalysisConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
