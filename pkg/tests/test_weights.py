"""Muckenhoupt-type constants, two-weight condition, subset sampling."""

import math

import numpy as np
import pytest

from amalgam.functions import power_function, scaled
from amalgam.measure import lebesgue, make_interval, power_measure
from amalgam.weights import (
    SubsetSampler,
    a_infty_epsilon_delta,
    a_r_constant,
    default_interval_family,
    make_weight,
    reverse_holder_check,
    thm21_condition,
)

LEB = lebesgue()
ONE = make_weight({"kind": "one"})


def small_family(m, centers=12, scales=5):
    return default_interval_family(m, span_mass=16.0, centers=centers, scales=scales)


def test_a2_of_one_is_one():
    res = a_r_constant(LEB, ONE, 2, small_family(LEB))
    assert res.constant == pytest.approx(1.0, abs=1e-9)
    assert not res.diverging
    assert res.interval_count > 0


def test_a2_sqrt_weight_matches_closed_form():
    # For w = |x|^(1/2) the product of averages over [-h, h] is
    # (2/3)(2) h^(1/2) h^(-1/2) /2... the symmetric-interval value 1.5
    # is the sup; off-center intervals give less.
    w = make_weight({"kind": "power", "b": 0.5})
    res = a_r_constant(LEB, w, 2, small_family(LEB))
    assert not res.diverging
    assert 1.35 <= res.constant <= 1.5 * (1.0 + 1e-6)


def test_a2_cubic_weight_diverges():
    res = a_r_constant(LEB, make_weight({"kind": "power", "b": 3.0}), 2,
                       small_family(LEB))
    assert res.diverging


def test_a2_scale_invariance():
    fam = small_family(LEB, centers=6, scales=3)
    w = power_function(0.5, (-1e6, 1e6))
    base = a_r_constant(LEB, w, 2, fam).constant
    for c in (2.0, 10.0, 0.5):
        val = a_r_constant(LEB, scaled(w, c), 2, fam).constant
        assert val == pytest.approx(base, rel=1e-9)


def test_a_r_jensen_lower_bound():
    fam = small_family(LEB, centers=6, scales=3)
    for spec in ({"kind": "one"}, {"kind": "power", "b": 0.3},
                 {"kind": "power", "b": -0.4}):
        for r in (1, 1.5, 2, 3):
            res = a_r_constant(LEB, make_weight(spec), r, fam)
            assert res.constant >= 1.0 - 1e-9


def test_a_r_monotone_in_family():
    w = make_weight({"kind": "power", "b": 0.5})
    fam1 = small_family(LEB, centers=6, scales=3)
    fam2 = fam1 + [make_interval(LEB, -5.0, 0.1), make_interval(LEB, 0.01, 7.0)]
    c1 = a_r_constant(LEB, w, 2, fam1).constant
    c2 = a_r_constant(LEB, w, 2, fam2).constant
    assert c2 >= c1 - 1e-12


def test_a_r_argmax_attains_constant():
    w = make_weight({"kind": "power", "b": 0.5})
    res = a_r_constant(LEB, w, 2, small_family(LEB, centers=6, scales=3))
    assert res.argmax_interval is not None


def test_a_r_rejects_nonpositive_weight():
    neg = scaled(power_function(0.0, (-1e6, 1e6)), -1.0)
    with pytest.raises(ValueError):
        a_r_constant(LEB, neg, 2, small_family(LEB, centers=4, scales=2))


def test_a_r_rejects_infinite_r():
    with pytest.raises(ValueError):
        a_r_constant(LEB, ONE, math.inf, small_family(LEB, centers=4, scales=2))


def test_a_1_branch_constant_weight():
    res = a_r_constant(LEB, ONE, 1, small_family(LEB, centers=6, scales=3))
    assert res.constant == pytest.approx(1.0, abs=1e-9)


def test_thm21_constant_weight():
    res = thm21_condition(LEB, ONE, 1, 2, 4, small_family(LEB, centers=6, scales=3))
    assert res.constant == pytest.approx(1.0, abs=1e-9)


def test_thm21_equal_exponents_branch():
    fam = small_family(LEB, centers=6, scales=3)
    res = thm21_condition(LEB, ONE, 1.5, 1.5, 6, fam)
    assert res.constant == pytest.approx(1.0, abs=1e-6)
    # v bounded away from zero keeps ess sup of 1/v finite.
    bounded = make_weight({"kind": "table",
                           "points": [[-20.0, 1.0], [0.0, 0.5], [20.0, 1.0]]})
    res2 = thm21_condition(LEB, bounded, 1.5, 1.5, 6, fam)
    assert np.isfinite(res2.constant) and not res2.diverging
    # A weight vanishing at 0 makes the second factor blow up there.
    res3 = thm21_condition(LEB, make_weight({"kind": "power", "b": 0.05}),
                           1.5, 1.5, 6, fam)
    assert res3.diverging or not np.isfinite(res3.constant)


def test_thm21_matches_a_r_through_exponent_identity():
    # q=1, q1=2, beta=4 gives 1/theta = 1/2 - 1/4, theta = 4,
    # w = v^theta and r = 1 + theta (1/q - 1/q1) = 3.
    fam = small_family(LEB, centers=8, scales=4)
    v = make_weight({"kind": "power", "b": 0.1})
    theta = 4.0
    lhs = thm21_condition(LEB, v, 1, 2, 4, fam).constant ** theta
    rhs = a_r_constant(LEB, make_weight({"kind": "power", "b": 0.4}), 3, fam).constant
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_reverse_holder_constant_weight():
    C, delta, violations = reverse_holder_check(
        LEB, ONE, small_family(LEB, centers=6, scales=3))
    assert delta == pytest.approx(1.0, abs=1e-6)
    assert C == pytest.approx(1.0, abs=1e-9)
    assert violations == 0


def test_reverse_holder_power_weight():
    C, delta, violations = reverse_holder_check(
        LEB, make_weight({"kind": "power", "b": 0.5}),
        small_family(LEB, centers=8, scales=4))
    assert 0.0 < delta <= 1.0
    assert np.isfinite(C) and C >= 1.0 - 1e-9
    assert violations == 0


def test_a_infty_constant_weight():
    fam = small_family(LEB, centers=6, scales=3)
    assert a_infty_epsilon_delta(LEB, ONE, 0.5, fam) == pytest.approx(0.5)
    assert a_infty_epsilon_delta(LEB, ONE, 1.0, fam) == pytest.approx(1.0)


def test_a_infty_power_weight_consistent_with_fit():
    fam = small_family(LEB, centers=8, scales=4)
    w = make_weight({"kind": "power", "b": 0.5})
    delta_hat = a_infty_epsilon_delta(LEB, w, 0.5, fam)
    assert 0.0 < delta_hat <= 0.5
    C, delta, _ = reverse_holder_check(LEB, w, fam)
    predicted = (0.5 / C) ** (1.0 / delta)
    # Stratified sampling quantizes delta-hat; same order of magnitude.
    assert delta_hat >= min(predicted, 0.01) / 10.0


def test_a_infty_rejects_bad_eps():
    with pytest.raises(ValueError):
        a_infty_epsilon_delta(LEB, ONE, 0.0, small_family(LEB, centers=4, scales=2))


def test_subset_sampler_deterministic_and_exact():
    m = power_measure(0.5)
    I = make_interval(m, -1.0, 2.0)
    s1 = list(SubsetSampler(seed=3).pairs(m, I))
    s2 = list(SubsetSampler(seed=3).pairs(m, I))
    assert len(s1) == len(s2) > 0
    for (p1, f1), (p2, f2) in zip(s1, s2):
        assert f1 == f2
        assert [(iv.a, iv.b) for iv in p1] == [(iv.a, iv.b) for iv in p2]
    for pieces, frac in s1:
        total = sum(iv.mass for iv in pieces)
        assert total == pytest.approx(frac * I.mass, rel=1e-9)
        for iv in pieces:
            assert iv.a >= I.a - 1e-12 and iv.b <= I.b + 1e-12
