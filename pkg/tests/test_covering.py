"""Mass midpoints, greedy cover selection, overlap certification."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from amalgam.covering import make_family, midpoint, random_family, select_cover
from amalgam.measure import (
    IntervalRC,
    custom_measure,
    lebesgue,
    make_interval,
    power_measure,
)

LEB = lebesgue()
CUSTOM = custom_measure([[-2.0, 0.5], [-1.0, 1.0], [0.0, 2.0], [1.0, 1.0],
                         [2.0, 0.5]], 0.5, 0.5)


def test_midpoint_lebesgue():
    assert midpoint(LEB, make_interval(LEB, 0.0, 2.0)) == pytest.approx(1.0, abs=1e-12)
    assert midpoint(LEB, make_interval(LEB, -1.0, 3.0)) == pytest.approx(1.0, abs=1e-12)


def test_midpoint_power():
    m = power_measure(0.5)
    assert midpoint(m, make_interval(m, 0.0, 1.0)) == pytest.approx(0.25, abs=1e-10)


def test_midpoint_rejects_zero_mass():
    with pytest.raises(ValueError):
        midpoint(LEB, IntervalRC(0.0, 1.0, mass=0.0))


@pytest.mark.parametrize("m", [LEB, power_measure(0.5), CUSTOM],
                         ids=lambda m: m.kind)
def test_family_halves_mass(m):
    ivs = [make_interval(m, a, b) for a, b in [(-2.0, 0.5), (0.1, 1.7), (-4.0, 3.0)]]
    fam = make_family(m, ivs, make_interval(m, -5.0, 5.0))
    for iv, c in zip(fam.intervals, fam.midpoints):
        assert iv.a < c < iv.b
        left = make_interval(m, iv.a, c).mass
        assert left == pytest.approx(0.5 * iv.mass, rel=1e-9)


def test_select_single_interval():
    fam = make_family(LEB, [make_interval(LEB, 0.0, 1.0)],
                      make_interval(LEB, -2.0, 2.0))
    selected, overlap = select_cover(fam)
    assert selected == [0]
    assert overlap == 1


def test_select_disjoint_intervals():
    ivs = [make_interval(LEB, float(i), i + 0.8) for i in range(5)]
    fam = make_family(LEB, ivs, make_interval(LEB, -1.0, 6.0))
    selected, overlap = select_cover(fam)
    assert sorted(selected) == [0, 1, 2, 3, 4]
    assert overlap == 1


def test_select_ignores_midpoints_outside_window():
    ivs = [make_interval(LEB, 0.0, 1.0), make_interval(LEB, 10.0, 11.0)]
    fam = make_family(LEB, ivs, make_interval(LEB, -2.0, 2.0))
    selected, _ = select_cover(fam)
    assert selected == [0]


def coverage_holds(fam, selected):
    chosen = [fam.intervals[i] for i in selected]
    for c in fam.midpoints:
        if fam.window.a <= c < fam.window.b:
            if not any(iv.a <= c < iv.b for iv in chosen):
                return False
    return True


@pytest.mark.parametrize("m", [LEB, power_measure(0.5)], ids=lambda m: m.kind)
def test_random_trials(m):
    for trial in range(200):
        fam = random_family(m, count=40, seed=trial)
        selected, overlap = select_cover(fam)
        assert coverage_holds(fam, selected)
        assert overlap <= 5


def test_select_deterministic():
    fam = random_family(LEB, count=30, seed=123)
    s1, o1 = select_cover(fam)
    s2, o2 = select_cover(fam)
    assert s1 == s2 and o1 == o2


def test_overlap_matches_brute_force():
    rng = np.random.default_rng(7)
    for seed in (0, 4, 9):
        fam = random_family(LEB, count=25, seed=seed)
        selected, overlap = select_cover(fam)
        chosen = [fam.intervals[i] for i in selected]
        probes = np.concatenate([
            rng.uniform(fam.window.a, fam.window.b, size=10_000),
            [iv.a for iv in chosen], [iv.b - 1e-12 for iv in chosen]])
        counts = np.zeros(probes.shape, dtype=int)
        for iv in chosen:
            counts += (probes >= iv.a) & (probes < iv.b)
        brute = int(np.max(counts)) if len(chosen) else 0
        assert brute <= overlap <= 5


@settings(max_examples=40, deadline=None)
@given(count=st.integers(1, 25), seed=st.integers(0, 10_000))
def test_random_family_property(count, seed):
    fam = random_family(LEB, count=count, seed=seed)
    selected, overlap = select_cover(fam)
    assert coverage_holds(fam, selected)
    assert 1 <= overlap <= 5
    assert len(set(selected)) == len(selected)
