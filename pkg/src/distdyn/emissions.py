"""Fuel-based CO2 accounting, GDP deflation and emission intensity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import DegenerateGDP, InvalidDeflator, InvalidQuantity, MissingFactor

# molecular mass of CO2 over atomic mass of carbon
CO2_PER_CARBON = 44.0 / 12.0

NATIONAL = "*"


@dataclass(frozen=True)
class FuelFactors:
    cf: float   # physical unit -> energy unit
    cc: float   # carbon content per energy unit
    cof: float  # oxidised fraction

    def __post_init__(self):
        if not (self.cf > 0 and self.cc > 0 and self.cof > 0):
            raise ValueError(f"emission factors must be positive: {self}")
        if self.cof > 1:
            raise ValueError(f"oxidation fraction must be <= 1: {self.cof}")


EmissionFactors = Mapping[str, FuelFactors]


def estimate_co2(consumption: Mapping[tuple, float], factors: EmissionFactors) -> dict:
    """Sum ``E * CF * CC * COF * 44/12`` over fuels for each ``(entity, year)``.

    ``consumption`` maps ``(entity, year, fuel)`` to a nonnegative quantity.
    """
    out: dict = {}
    for (entity, year, fuel), qty in consumption.items():
        if fuel not in factors:
            raise MissingFactor(fuel)
        if not qty >= 0:
            raise InvalidQuantity(f"negative consumption {qty} for {entity!r} {year} {fuel!r}")
        f = factors[fuel]
        term = qty * f.cf * f.cc * f.cof * CO2_PER_CARBON
        key = (entity, year)
        out[key] = out.get(key, 0.0) + term
    return out


def _index(deflator: Mapping[tuple, float], entity, year) -> float:
    if (entity, year) in deflator:
        idx = deflator[(entity, year)]
    elif (NATIONAL, year) in deflator:
        idx = deflator[(NATIONAL, year)]
    else:
        raise InvalidDeflator(f"no deflator for {entity!r} in {year}")
    if not idx > 0:
        raise InvalidDeflator(f"nonpositive deflator {idx} for {entity!r} in {year}")
    return idx


def deflate(nominal: Mapping[tuple, float], deflator: Mapping[tuple, float],
            base_year: int) -> dict:
    """Re-express nominal values at ``base_year`` prices.

    Deflator rows keyed by entity ``"*"`` apply to every entity without its own row.
    """
    for key, idx in deflator.items():
        if not idx > 0:
            raise InvalidDeflator(f"nonpositive deflator {idx} at {key}")
    return {
        (e, t): v * _index(deflator, e, base_year) / _index(deflator, e, t)
        for (e, t), v in nominal.items()
    }


def intensity(co2: Mapping[tuple, float], real_gdp: Mapping[tuple, float]) -> dict:
    out = {}
    for key, mass in co2.items():
        gdp = real_gdp.get(key)
        if gdp is None or not gdp > 0:
            raise DegenerateGDP(*key)
        out[key] = mass / gdp
    return out
