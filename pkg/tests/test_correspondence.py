import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfchain.core import Alphabet, BoundaryCondition, Window, WindowConfig
from halfchain.correspondence import (Exterior, FiniteLSS, FiniteSpecification, ZeroDenominator,
                                      all_site_subsets, check_roundtrips,
                                      check_specification_consistency, comparison_bound_check,
                                      map_b, map_c, random_lss_pair, window_intervals)
from halfchain.couplings import IsingPotential, PowerLaw
from halfchain.kernels import ExteriorSpec

PLUS = BoundaryCondition.all_plus()


def brute_b(f, sites, omega):
    """gamma^f on ``sites`` from explicit products of singleton kernels."""
    q, ls = f.q, f.ls
    l = min(sites)
    out = []
    for sigma in itertools.product(range(q), repeat=len(sites)):
        full = list(omega)
        for s, c in zip(sites, sigma):
            full[s - ls] = c
        prob = 1.0
        for i in range(l, 1):
            prob *= f.singleton(i, full[i - ls], full[: i - ls])
        out.append(prob)
    out = np.array(out)
    return out / out.sum()


@pytest.mark.parametrize("q", [2, 3])
def test_map_b_matches_products(q):
    f = random_lss_pair(-3, q, seed=11)
    g = map_b(f)
    rng = np.random.default_rng(0)
    for sites in [(-3,), (-2, -1), (-3, -1), (-2, 0), (-1,)]:
        omega = rng.integers(0, q, size=4)
        assert np.allclose(g.kernel(sites, omega), brute_b(f, sites, omega), atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]), st.integers(-4, -1))
def test_roundtrips_random_lss(seed, q, ls):
    f = random_lss_pair(ls, q, seed)
    assert f.normalization_defect() < 1e-14 and f.min_prob() > 0
    d_cb, d_bc = check_roundtrips(f, map_b(f))
    assert d_cb <= 1e-12 and d_bc <= 1e-12
    whole = tuple(range(ls, 1))
    for l, m in window_intervals(ls):
        assert check_specification_consistency(map_b(f), tuple(range(l, m + 1)), whole) <= 1e-12


def test_non_interval_consistency():
    f = random_lss_pair(-3, 3, 5)
    g = map_b(f)
    for lam in all_site_subsets(-3, 2):
        assert check_specification_consistency(g, lam, (-3, -2, -1, 0)) <= 1e-12


def test_ising_specification_equals_b_of_lss(oracle):
    pot = IsingPotential(PowerLaw(2.0), 0.9)
    ext = ExteriorSpec(PLUS, 64)
    f = FiniteLSS.from_potential(pot, -3, ext)
    g = FiniteSpecification.from_potential(pot, -3, ext)
    gb = map_b(f)
    for sites in all_site_subsets(-3):
        for omega in itertools.product((0, 1), repeat=4):
            assert np.allclose(gb.kernel(sites, np.array(omega)), g.kernel(sites, np.array(omega)),
                               atol=1e-13)
    # the non-interval route against loop enumeration
    omega = (1, 0, 1, 0)
    outside = oracle.tail(-3 - 64, -4)
    outside.update({-2: -1, 0: -1})
    want = oracle.kernel(oracle.power(2.0), 0.9, [-3, -1], outside)
    got = g.kernel((-3, -1), np.array(omega))
    assert np.allclose(got, [want[c] for c in itertools.product((-1, 1), repeat=2)], atol=1e-14)
    d_cb, d_bc = check_roundtrips(f, g)
    assert d_cb <= 1e-12 and d_bc <= 1e-12


def test_map_c_of_b_is_identity_on_tables():
    f = random_lss_pair(-2, 3, 3)
    back = map_c(map_b(f))
    for A, B in zip(back.tables, f.tables):
        assert np.allclose(A, B, atol=1e-15)


def test_zero_denominator():
    tables = [np.array([[1.0, 0.0]]), np.array([[1.0, 0.0], [0.5, 0.5]])]
    f = FiniteLSS(-1, Alphabet((-1, 1)), tables)
    g = map_b(f)
    with pytest.raises(ZeroDenominator):
        g.kernel((-1,), np.array([0, 1]))


def test_lss_shape_validation():
    with pytest.raises(ValueError):
        FiniteLSS(-1, Alphabet((-1, 1)), [np.ones((1, 2)) / 2])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_comparison_bound(seed):
    rng = np.random.default_rng(seed)
    pot = IsingPotential(PowerLaw(float(rng.uniform(1.2, 3))), float(rng.uniform(0, 3)))
    n = int(rng.integers(1, 7))
    w = Window(-n + 1 - 2, -2)
    h = rng.uniform(-1, 1, 2**n)

    def ext():
        bc = BoundaryCondition.all_plus() if rng.random() < 0.5 else BoundaryCondition.all_minus()
        past = WindowConfig.on(w.l - 2, tuple(rng.choice([-1, 1], 2)))
        inside = WindowConfig.on(-1, tuple(rng.choice([-1, 1], 2)))
        return Exterior(ExteriorSpec(bc, 32), past, inside)

    lhs, rhs, ok = comparison_bound_check(pot, w, h, ext(), ext())
    assert ok and lhs <= rhs + 1e-12
