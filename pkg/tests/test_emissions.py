import pytest
from hypothesis import given
from hypothesis import strategies as st

from distdyn.emissions import FuelFactors, deflate, estimate_co2, intensity
from distdyn.errors import (DegenerateGDP, InvalidDeflator, InvalidQuantity, MissingFactor)

UNIT = {"coal": FuelFactors(1, 1, 1)}
TWO = {"coal": FuelFactors(1, 0.5, 1), "gas": FuelFactors(2, 0.25, 0.9)}

factor = st.floats(0.01, 10)
# products of subnormal quantities underflow, where doubling is no longer exact
qty = st.one_of(st.just(0.0), st.floats(1e-6, 1e4))


def test_zero_consumption():
    assert estimate_co2({("a", 2000, "coal"): 0.0}, UNIT) == {("a", 2000): 0.0}


def test_single_fuel_unit_factors():
    assert estimate_co2({("a", 2000, "coal"): 12.0}, UNIT)[("a", 2000)] == pytest.approx(44.0, abs=1e-12)


def test_two_fuel_example():
    co2 = estimate_co2({("a", 2000, "coal"): 10.0, ("a", 2000, "gas"): 6.0}, TWO)
    # 10*1*0.5*1*44/12 + 6*2*0.25*0.9*44/12
    assert co2[("a", 2000)] == pytest.approx(18.333333333333333 + 9.9, abs=1e-9)


def test_unknown_fuel_and_negative_quantity():
    with pytest.raises(MissingFactor):
        estimate_co2({("a", 2000, "peat"): 1.0}, UNIT)
    with pytest.raises(InvalidQuantity):
        estimate_co2({("a", 2000, "coal"): -1.0}, UNIT)


def test_factor_validation():
    with pytest.raises(ValueError):
        FuelFactors(1, 1, 1.2)
    with pytest.raises(ValueError):
        FuelFactors(0, 1, 0.5)


@given(st.lists(st.tuples(qty, factor, factor, st.floats(0.05, 1)), min_size=1, max_size=8))
def test_linear_and_additive(rows):
    factors = {f"f{i}": FuelFactors(cf, cc, cof) for i, (_, cf, cc, cof) in enumerate(rows)}
    cons = {("a", 2000, f"f{i}"): e for i, (e, *_ ) in enumerate(rows)}
    joint = estimate_co2(cons, factors)[("a", 2000)]
    doubled = estimate_co2({k: 2 * v for k, v in cons.items()}, factors)[("a", 2000)]
    assert doubled == 2 * joint
    per_fuel = sum(estimate_co2({k: v}, factors)[("a", 2000)] for k, v in cons.items())
    assert per_fuel == pytest.approx(joint, rel=1e-12, abs=1e-12)


@given(qty, st.floats(0.01, 0.99))
def test_split_fuel_rows_invariant(e, share):
    f = FuelFactors(0.7, 2.0, 0.9)
    whole = estimate_co2({("a", 2000, "x"): e}, {"x": f})
    split = estimate_co2({("a", 2000, "x"): e * share, ("a", 2000, "y"): e * (1 - share)},
                         {"x": f, "y": f})
    gdp = {("a", 2000): 3.0}
    assert intensity(split, gdp)[("a", 2000)] == pytest.approx(
        intensity(whole, gdp)[("a", 2000)], rel=1e-12, abs=1e-12)


def test_deflate_examples():
    nominal = {("a", 2000): 100.0, ("a", 2001): 110.0}
    assert deflate(nominal, {("a", 2000): 50.0, ("a", 2001): 50.0}, 2000) == nominal
    real = deflate(nominal, {("a", 2000): 100.0, ("a", 2001): 110.0}, 2000)
    assert real[("a", 2001)] == pytest.approx(100.0, abs=1e-12)
    with pytest.raises(InvalidDeflator):
        deflate(nominal, {("a", 2000): 100.0, ("a", 2001): 0.0}, 2000)


def test_deflate_national_broadcast():
    nominal = {("a", 2001): 110.0, ("b", 2001): 220.0}
    index = {("*", 2000): 100.0, ("*", 2001): 110.0, ("b", 2000): 100.0, ("b", 2001): 200.0}
    real = deflate(nominal, index, 2000)
    assert real[("a", 2001)] == pytest.approx(100.0)
    assert real[("b", 2001)] == pytest.approx(110.0)


def test_intensity():
    assert intensity({("a", 1): 0.0}, {("a", 1): 5.0}) == {("a", 1): 0.0}
    assert intensity({("a", 1): 50.0}, {("a", 1): 25.0}) == {("a", 1): 2.0}
    with pytest.raises(DegenerateGDP):
        intensity({("a", 1): 50.0}, {("a", 1): 0.0})
