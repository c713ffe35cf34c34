import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfchain.correspondence import random_lss_pair
from halfchain.couplings import Hierarchical, IsingPotential, PowerLaw, Table
from halfchain.sensitivity import (AnalyticBound, ExhaustiveTails, ExtremalTails, IsingSource,
                                   a_coefficient, ising_bounds, left_coupling_sum, oscillation,
                                   sensitivity_row, sensitivity_rows, variation)


def brute_coefficients(f, i, k):
    """var, osc, a, b of f_i at lag k by looping over pairs of pasts on [ls, i-1]."""
    q, ls = f.q, f.ls
    pasts = list(itertools.product(range(q), repeat=i - ls))
    cut = k - ls + 1  # positions < cut are the sites <= k

    def row(p):
        return np.array([f.singleton(i, x, p) for x in range(q)])

    var = osc = 0.0
    a = b = np.inf
    for p in pasts:
        same = [s for s in pasts if s[cut:] == p[cut:]]
        a = min(a, np.min([row(s) for s in same], axis=0).sum())
        for s in same:
            d = np.abs(row(p) - row(s)).max()
            var = max(var, d)
            b = min(b, np.minimum(row(p), row(s)).sum())
            if all(s[t] == p[t] for t in range(len(p)) if t != cut - 1):
                osc = max(osc, d)
    return var, osc, a, b


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_three_symbol_lss_against_loops(seed):
    f = random_lss_pair(-4, 3, seed)
    for i in (-2, 0):
        for k in range(-4, i):
            r = sensitivity_row(f, i, k)
            want = brute_coefficients(f, i, k)
            assert (r.var, r.osc, r.a, r.b) == pytest.approx(want, abs=1e-15)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.2, 3.0), st.floats(0.0, 3.0), st.integers(-3, 0), st.integers(1, 4))
def test_binary_identity_and_orderings(p, beta, i, lag):
    pot = IsingPotential(PowerLaw(p), beta)
    k = i - lag
    src = IsingSource(pot, depth=256)
    r = sensitivity_row(src, i, k, ExhaustiveTails(4))
    assert abs(r.a - (1 - r.var)) <= 1e-12
    assert abs(r.b - (1 - r.var)) <= 1e-12
    assert r.osc <= r.var + 1e-15
    assert r.var <= r.var_bound + 1e-12
    assert r.osc <= r.osc_bound + 1e-12


def test_extremal_matches_exhaustive_variation_for_ferromagnets():
    pot = IsingPotential(PowerLaw(1.5), 1.0)
    src = IsingSource(pot, depth=512)
    for i, k in [(0, -1), (0, -3), (-1, -4)]:
        ext = sensitivity_row(src, i, k, ExtremalTails())
        exh = sensitivity_row(src, i, k, ExhaustiveTails(6))
        assert ext.var == pytest.approx(exh.var, abs=1e-13)
        # single-site oscillation from two tails is only a lower bound
        assert ext.osc <= exh.osc + 1e-15


def test_extremal_oscillation_is_strictly_below_exhaustive():
    src = IsingSource(IsingPotential(PowerLaw(1.5), 2.0), depth=512)
    ext = sensitivity_row(src, 0, -1, ExtremalTails())
    exh = sensitivity_row(src, 0, -1, ExhaustiveTails(6))
    assert ext.osc < exh.osc


def test_beta_zero_is_trivial():
    pot = IsingPotential(PowerLaw(2.0), 0.0)
    rows = sensitivity_rows(pot, 0, [-1, -2, -5])
    for r in rows:
        assert r.var == r.osc == 0.0 and r.a == r.b == 1.0
        assert r.var_bound == 0.0


def test_frozen_bound_value():
    # p=2, beta=0.5, i=0, k=-4: beta * sum_{l <= -3} l**-2 = 0.5 * (pi^2/6 - 1 - 1/4)
    pot = IsingPotential(PowerLaw(2.0), 0.5)
    osc_b, var_b = ising_bounds(pot, 0, -4)
    assert var_b == pytest.approx(0.5 * (np.pi**2 / 6 - 1.25), rel=1e-14)
    assert var_b == pytest.approx(0.19746703342411, abs=1e-12)
    assert osc_b == pytest.approx(0.5 / 16)
    assert variation(pot, 0, -4) <= var_b


def test_shortcut_bounds_dominate_full():
    pot = IsingPotential(PowerLaw(2.0), 1.0)
    for i, k in [(-2, -5), (-3, -4)]:
        o, v = ising_bounds(pot, i, k)
        os_, vs = ising_bounds(pot, i, k, shortcut=True)
        assert os_ >= o - 1e-15 and vs >= v - 1e-15
    with pytest.raises(ValueError):
        ising_bounds(IsingPotential(Table(((-1, 0, 1.0),)), 1.0), 0, -2, shortcut=True)


def test_analytic_bound_method():
    pot = IsingPotential(PowerLaw(3.0), 0.2)
    r = sensitivity_row(pot, 0, -3, AnalyticBound())
    assert r.method == "analytic_bound"
    assert r.var == pytest.approx(r.var_bound) and r.a == pytest.approx(1 - r.var_bound)


def test_left_coupling_sum_against_loops():
    m = PowerLaw(2.5)
    want = sum(abs(j + 2) ** -2.5 for j in range(-200000, -4))
    assert left_coupling_sum(m, -2, -5) == pytest.approx(want, rel=1e-6)
    h = Hierarchical(alpha=1.5)
    from halfchain.couplings import coupling
    brute = sum(coupling(h, -3, l) for l in range(-(2**14), -1) if l != -3)
    assert brute <= left_coupling_sum(h, -3, -2) <= brute + h.tail_bound(2**14 - 10)


def test_hierarchical_and_finite_lss_sources():
    pot = IsingPotential(Hierarchical(alpha=1.5), 0.5)
    r = sensitivity_row(pot, 0, -2)
    assert 0 < r.var <= r.var_bound
    f = random_lss_pair(-2, 2, 0)
    r = sensitivity_row(f, 0, -5)  # nothing varies below the window
    assert r.var == 0.0 and r.a == 1.0


def test_invalid_lag():
    pot = IsingPotential(PowerLaw(2.0), 1.0)
    with pytest.raises(ValueError):
        oscillation(pot, -2, -2)
    with pytest.raises(ValueError):
        a_coefficient(pot, -2, 0)
    with pytest.raises(ValueError):
        ExhaustiveTails(0)


def test_single_coupling_table_closed_form():
    # only J(0, -1) = 1: f_0(+ | w_-1 = +-1) = e^{+-1} / (2 cosh 1), so var = tanh(1)
    pot = IsingPotential(Table(((-1, 0, 1.0),)), 1.0)
    r = sensitivity_row(pot, 0, -1, ExhaustiveTails(3))
    assert r.var == pytest.approx(np.tanh(1.0), abs=1e-15)
    assert r.osc == pytest.approx(np.tanh(1.0), abs=1e-15)
    assert sensitivity_row(pot, 0, -2, ExhaustiveTails(3)).var == pytest.approx(0.0, abs=1e-15)


def test_shortcut_bound_example():
    _, v = ising_bounds(IsingPotential(PowerLaw(2.0), 1.0), 0, -3, shortcut=True)
    assert v == pytest.approx(np.pi**2 / 6 - 1, rel=1e-13)
    assert v == pytest.approx(0.644934, abs=1e-6)


@pytest.mark.parametrize("q", [2, 3])
def test_variation_below_summed_oscillations(q):
    for seed in range(20):
        f = random_lss_pair(-5, q, seed)
        for i in (-1, 0):
            for k in range(-5, i):
                var = sensitivity_row(f, i, k).var
                osc_sum = sum(sensitivity_row(f, i, j).osc for j in range(-5, k + 1))
                assert var <= osc_sum + 1e-15


def test_binary_identity_random_table_lss():
    for seed in range(100):
        f = random_lss_pair(-4, 2, seed)
        for i in (-2, 0):
            for k in range(-4, i):
                r = sensitivity_row(f, i, k)
                assert abs(r.a - (1 - r.var)) <= 1e-12 and abs(r.b - (1 - r.var)) <= 1e-12


def test_extremal_equals_exhaustive_depth8():
    rng = np.random.default_rng(8)
    for _ in range(6):
        pot = IsingPotential(PowerLaw(float(rng.uniform(1.2, 3))), float(rng.uniform(0.1, 3)))
        src = IsingSource(pot)
        for i, k in [(0, -1), (0, -2), (-1, -3)]:
            ext = sensitivity_row(src, i, k, ExtremalTails())
            exh = sensitivity_row(src, i, k, ExhaustiveTails(8))
            assert abs(ext.var - exh.var) <= 1e-12
            assert abs(ext.a - exh.a) <= 1e-12 and abs(ext.b - exh.b) <= 1e-12


def test_bounds_hold_over_sweep():
    rng = np.random.default_rng(200)
    for _ in range(200):
        model = (PowerLaw(float(rng.uniform(1.1, 3))) if rng.random() < 0.7
                 else Hierarchical(alpha=float(rng.uniform(1.1, 3))))
        pot = IsingPotential(model, float(rng.uniform(0, 3)))
        i = -int(rng.integers(0, 4))
        k = i - int(rng.integers(1, 5))
        r = sensitivity_row(pot, i, k)
        assert r.var <= r.var_bound + 1e-12 and r.osc <= r.osc_bound + 1e-12


def test_variation_grows_with_beta_on_grid():
    # empirical check on a grid; not a claimed theorem
    for p in (1.5, 2.5):
        vals = [variation(IsingPotential(PowerLaw(p), b), 0, -3) for b in (0.1, 0.3, 0.6, 1.0)]
        assert all(y >= x - 1e-12 for x, y in zip(vals, vals[1:]))
