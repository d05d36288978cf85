"""Maximal operator, potential operator, Riesz routes, far-field data."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from amalgam.functions import RealFunction, indicator, scaled, table_function, tent
from amalgam.measure import IntervalRC, lebesgue, power_measure
from amalgam.operators import (
    MaximalQuery,
    default_mass_grid,
    default_query,
    farfield_bound_check,
    make_kernel,
    maximal,
    maximal_profile,
    potential,
    riesz_kernel,
    riesz_potential,
    riesz_via_power_measure,
    table_kernel,
)

LEB = lebesgue()
CHI01 = indicator(0.0, 1.0)
CHI11 = indicator(-1.0, 1.0)
ZERO = table_function([[0.0, 0.0], [1.0, 0.0]])


def test_maximal_outside_support():
    # Best interval from x = 2 back into [0,1): average (1-t)/(2-t) at t=0.
    val = maximal(LEB, CHI01, 1, math.inf, 2.0)
    assert val == pytest.approx(0.5, abs=1e-3)


def test_maximal_inside_support():
    val = maximal(LEB, CHI01, 1, math.inf, 0.5)
    assert val == pytest.approx(1.0, abs=1e-6)
    assert val <= 1.0 + 1e-7   # documented qth-mean table error


def test_maximal_zero_function():
    assert maximal(LEB, ZERO, 1, math.inf, 0.3) == 0.0
    assert maximal(power_measure(0.5), ZERO, 2, 4, -1.0) == 0.0


def test_maximal_rejects_q_above_beta():
    with pytest.raises(ValueError):
        maximal(LEB, CHI01, 4, 2, 0.0)


@pytest.mark.parametrize("x", [-1.5, 0.25, 0.9, 3.0])
def test_maximal_homogeneity_pointwise(x):
    base = maximal(LEB, CHI01, 1, math.inf, x)
    doubled = maximal(LEB, scaled(CHI01, 2.0), 1, math.inf, x)
    assert doubled == pytest.approx(2.0 * base, rel=1e-9)


def test_maximal_profile_homogeneity_random_points():
    rng = np.random.default_rng(11)
    xs = rng.uniform(-4.0, 4.0, size=100)
    grid = default_mass_grid(LEB, CHI01, xs)
    base = maximal_profile(LEB, CHI01, 1, math.inf, xs, mass_grid=grid)
    doubled = maximal_profile(LEB, scaled(CHI01, 2.0), 1, math.inf, xs, mass_grid=grid)
    assert np.all(np.abs(doubled - 2.0 * base) <= 1e-9 * np.maximum(doubled, 1e-300))


def test_maximal_sublinear():
    f = CHI01
    g = indicator(0.5, 2.0)
    fg = RealFunction(eval=lambda x: f(x) + g(x), support=IntervalRC(0.0, 2.0),
                      label="f+g", breakpoints=(0.0, 0.5, 1.0, 2.0))
    for x in (-0.5, 0.75, 1.2, 2.5):
        query = default_query(LEB, fg, x)
        s = maximal(LEB, fg, 1, math.inf, x, query=query)
        a = maximal(LEB, f, 1, math.inf, x, query=query)
        b = maximal(LEB, g, 1, math.inf, x, query=query)
        assert s <= a + b + 1e-9


def test_maximal_grid_refinement_monotone():
    # The value is a max over candidates, so a superset grid cannot lose.
    coarse = default_mass_grid(LEB, CHI01, 2.0, count=16)
    fine = np.sort(np.concatenate([coarse, np.sqrt(coarse[:-1] * coarse[1:])]))
    for x in (0.3, 2.0, -1.0):
        v1 = maximal(LEB, CHI01, 1, math.inf, x,
                     query=MaximalQuery(x, coarse), refine=False)
        v2 = maximal(LEB, CHI01, 1, math.inf, x,
                     query=MaximalQuery(x, fine), refine=False)
        assert v2 >= v1 - 1e-12


def test_potential_riesz_symmetric():
    val = potential(LEB, CHI11, riesz_kernel(0.5), 0.0)
    assert val == pytest.approx(4.0, rel=1e-6)


def test_potential_zero_function():
    assert potential(LEB, ZERO, riesz_kernel(0.5), 0.0) == 0.0


def test_potential_disjoint_supports():
    box = table_kernel([[0.0, 1.0], [1.0, 1.0]])
    assert potential(LEB, CHI01, box, 3.0) == pytest.approx(0.0, abs=1e-12)


def test_potential_homogeneity():
    k = riesz_kernel(0.6)
    base = potential(LEB, CHI01, k, 0.4)
    assert potential(LEB, scaled(CHI01, 2.0), k, 0.4) == pytest.approx(
        2.0 * base, rel=1e-9)


def test_potential_farfield_decay():
    k = riesz_kernel(0.5)
    vals = [potential(LEB, CHI11, k, x) for x in (2.0, 3.0, 5.0, 9.0)]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_riesz_oracle():
    assert riesz_potential(CHI11, 0.5, 0.0) == pytest.approx(4.0, rel=1e-7)
    assert riesz_potential(CHI01, 0.5, 0.0) == pytest.approx(2.0, rel=1e-7)
    assert riesz_potential(ZERO, 0.5, 0.0) == 0.0


@pytest.mark.parametrize("a", [0.25, 0.5])
@pytest.mark.parametrize("gamma", [0.4, 0.6])
def test_riesz_route_agreement_spot(a, gamma):
    for x in (-1.7, -0.3, 0.45, 1.1, 2.6):
        direct = riesz_potential(CHI11, gamma, x)
        via = riesz_via_power_measure(CHI11, gamma, a, x)
        assert via == pytest.approx(direct, rel=1e-5)


def test_kernel_even_and_monotone():
    for k in (riesz_kernel(0.5),
              table_kernel([[0.0, 1.0], [0.5, 0.8], [1.0, 0.5], [2.0, 0.2]])):
        u = np.linspace(0.05, 3.0, 50)
        assert np.allclose(k(u), k(-u), rtol=1e-12)
        assert np.all(np.diff(k(u)) <= 1e-12)


def test_kernel_weak_eta_norm_cached_finite():
    k = riesz_kernel(0.5)
    v1 = k.weak_eta_norm(LEB, 2)
    v2 = k.weak_eta_norm(LEB, 2)
    assert np.isfinite(v1) and v1 == v2
    assert v1 == pytest.approx(math.sqrt(2.0), rel=1e-3)


def test_table_kernel_validation():
    with pytest.raises(ValueError):
        table_kernel([[0.5, 1.0], [1.0, 0.5]])        # must start at 0
    with pytest.raises(ValueError):
        table_kernel([[0.0, 0.5], [1.0, 1.0]])        # increasing
    with pytest.raises(ValueError):
        table_kernel([[0.0, 1.0], [1.0, -0.1]])       # negative


def test_make_kernel_specs():
    assert make_kernel({"kind": "riesz", "gamma": 0.5}).singular_exponent == -0.5
    k = make_kernel({"kind": "table", "points": [[0.0, 1.0], [1.0, 0.0]]})
    assert k(0.0) == 1.0
    with pytest.raises(ValueError):
        make_kernel({"kind": "box"})


def test_farfield_zero_function():
    lhs, rhs = farfield_bound_check(LEB, ZERO, 1, 2, -3.0, 0.0, 1.0, 4.0, 10.0,
                                    riesz_kernel(0.5))
    assert lhs == 0.0 and rhs == 0.0


def test_farfield_scaling_invariance():
    k = riesz_kernel(0.5)
    f = indicator(-1.0, 1.0)
    args = (1, 2, -3.0, -1.0, 1.0, 3.0, 10.0, k)
    lhs1, rhs1 = farfield_bound_check(LEB, f, *args)
    lhs2, rhs2 = farfield_bound_check(LEB, scaled(f, 2.0), *args)
    assert lhs2 == pytest.approx(2.0 * lhs1, rel=1e-9)
    assert rhs2 == pytest.approx(2.0 * rhs1, rel=1e-9)
    assert lhs2 / rhs2 == pytest.approx(lhs1 / rhs1, rel=1e-9)


def test_farfield_riesz_against_rectangle_rule():
    k = riesz_kernel(0.5)
    f = indicator(-1.0, 1.0)
    x = 10.0
    lhs, rhs = farfield_bound_check(LEB, f, 1, 2, -3.0, -1.0, 1.0, 3.0, x, k)
    ys = np.linspace(-1.0, 1.0, 100_001)[:-1] + 1e-5
    oracle = float(np.mean(np.abs(x - ys) ** -0.5)) * 2.0
    assert lhs == pytest.approx(oracle, rel=1e-4)
    assert np.isfinite(lhs / rhs) and lhs / rhs > 0.0


def test_farfield_geometry_validation():
    k = riesz_kernel(0.5)
    f = CHI11
    with pytest.raises(ValueError):
        farfield_bound_check(LEB, f, 1, 2, -1.0, -3.0, 1.0, 3.0, 10.0, k)
    with pytest.raises(ValueError):   # unequal flanks
        farfield_bound_check(LEB, f, 1, 2, -5.0, -1.0, 1.0, 3.0, 10.0, k)
    with pytest.raises(ValueError):   # x inside the far window
        farfield_bound_check(LEB, f, 1, 2, -3.0, -1.0, 1.0, 3.0, 2.0, k)


@settings(max_examples=20, deadline=None)
@given(gamma=st.floats(0.15, 0.85), x=st.floats(-0.9, 0.9))
def test_potential_positive_inside_support(gamma, x):
    val = potential(LEB, CHI11, riesz_kernel(gamma), x)
    assert val > 0.0
    assert np.isfinite(val)
