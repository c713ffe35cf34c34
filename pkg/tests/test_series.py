import math
import time

import numpy as np
import pytest

from halfchain.series import (CONDENSATION, CONVERGES, DIVERGES, FINITE, INCONCLUSIVE, PARTIAL_ONLY,
                              Growth, TailModel, calibration_series, classify, decide,
                              exp_neg_tail, fitted_exponent, growth_of_sum, partial_sums)


def test_calibration_series():
    series = calibration_series()
    assert len(series) == 12
    for name, term, tm, expected in series:
        t0 = time.perf_counter()
        cls = classify(term, tm)
        assert time.perf_counter() - t0 < 5
        assert cls.verdict == expected, name
        assert set(cls.partial_sums) == {100, 1000, 10000, 100000}


@pytest.mark.parametrize("model,verdict,basis", [
    (TailModel(1.5), CONVERGES, "AnalyticExponent"),
    (TailModel(0.5), DIVERGES, "AnalyticExponent"),
    (TailModel(1, 2), CONVERGES, CONDENSATION),
    (TailModel(1, 1), DIVERGES, CONDENSATION),
    (TailModel(1, 1, 2), CONVERGES, CONDENSATION),
    (TailModel(1, 1, 1), DIVERGES, CONDENSATION),
    (TailModel(1, -1), DIVERGES, CONDENSATION),
    (TailModel(math.nan), INCONCLUSIVE, PARTIAL_ONLY),
])
def test_decide(model, verdict, basis):
    assert decide(model) == (verdict, basis)


def test_partial_sums_exact():
    ps = partial_sums(lambda n: 1.0 / n**2, checkpoints=(10, 100))
    assert ps[10] == pytest.approx(sum(1 / k**2 for k in range(1, 11)), rel=1e-15)
    assert ps[100] == pytest.approx(math.pi**2 / 6 - 1 / 100 + 1 / 2e4, abs=1e-6)


def test_no_model_is_inconclusive_and_finite_support_converges():
    cls = classify(lambda n: 1.0 / n)
    assert cls.verdict == INCONCLUSIVE and cls.basis == PARTIAL_ONLY
    assert cls.partial_sums[100000] > cls.partial_sums[100]
    fin = classify(lambda n: np.where(n < 5, 1.0, 0.0), finite_support=4)
    assert fin.verdict == CONVERGES and fin.basis == FINITE


def test_mismatched_exponent_is_noted():
    cls = classify(lambda n: n**-2.0, TailModel(1.5))
    assert cls.notes and "fitted exponent" in cls.notes[0]
    assert fitted_exponent(lambda n: n**-2.0) == pytest.approx(2.0)


def test_growth_classes():
    assert growth_of_sum(1.0, 1.5, 0) == Growth("bounded")
    assert growth_of_sum(1.0, 1.0, 2.0) == Growth("bounded")
    assert growth_of_sum(2.0, 1.0, 1.0) == Growth("loglog", 2.0)
    assert growth_of_sum(1.0, 1.0, 0.5) == Growth("logpow", 2.0, 0.5)
    assert growth_of_sum(1.0, 1.0, 0.0) == Growth("logpow", 1.0, 1.0)
    assert growth_of_sum(1.0, 0.5, 0.0) == Growth("pow", 2.0, 0.5)
    assert growth_of_sum(0.0, 0.5, 0.0) == Growth("bounded")


def test_exp_neg_tail():
    # exp(-C log j) = j**-C
    assert exp_neg_tail(2.0, Growth("logpow", 1.0, 1.0)) == TailModel(2.0)
    assert decide(exp_neg_tail(0.5, Growth("logpow", 1.0, 1.0)))[0] == DIVERGES
    # exp(-C c log log j) = (log j)**-(C c)
    assert exp_neg_tail(3.0, Growth("loglog", 1.0)) == TailModel(0.0, 3.0)
    assert decide(exp_neg_tail(5.0, Growth("bounded")))[0] == DIVERGES
    assert decide(exp_neg_tail(0.1, Growth("pow", 1.0, 0.5)))[0] == CONVERGES
    assert decide(exp_neg_tail(0.1, Growth("logpow", 1.0, 1.5)))[0] == CONVERGES
