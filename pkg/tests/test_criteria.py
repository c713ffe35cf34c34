import math
from pathlib import Path

import numpy as np
import pytest

from halfchain import criteria as crit
from halfchain.correspondence import random_lss_pair
from halfchain.couplings import Hierarchical, IsingPotential, PowerLaw, PowerLog, Table
from halfchain.io import write_csv

GOLDEN = Path(__file__).parent / "golden" / "regimes.csv"


def test_regimes_table_matches_golden(tmp_path):
    rows = crit.regimes_table(crit.default_regime_models())
    out = tmp_path / "regimes.csv"
    write_csv(out, rows, ("model", "parameter", "verdict", "flags"))
    assert out.read_text() == GOLDEN.read_text()


def test_cff_verdicts():
    assert crit.cff(IsingPotential(PowerLaw(2.5), 1.0), 0).verdict == crit.UNIQUE
    assert crit.cff(IsingPotential(PowerLaw(2.5), 1.0), -8).verdict == crit.UNIQUE
    # g grows like a power for p < 2: the lower-bound series converges
    assert crit.cff(IsingPotential(PowerLaw(1.5), 1.0), 0).verdict == crit.UNDECIDED
    rep = crit.cff(IsingPotential(PowerLaw(2.0), 0.2), -4)
    assert rep.verdict == crit.UNDECIDED and rep.satisfied
    assert crit.cff(IsingPotential(PowerLaw(2.0), 0.0), 0).verdict == crit.UNIQUE


def test_harris_stenflo_delegates_for_binary():
    rep = crit.harris_stenflo(IsingPotential(PowerLaw(3.0), 0.5), 0)
    assert "delegated_to_cff" in rep.flags and rep.verdict == crit.UNIQUE
    assert rep.values["stenflo_partial_sums"] == rep.values["harris_partial_sums"]


def test_boundary_uniformity():
    assert crit.boundary_uniformity_series(IsingPotential(PowerLaw(2.5), 2.0), 0).verdict == crit.UNIQUE
    assert crit.boundary_uniformity_series(IsingPotential(PowerLaw(1.5), 2.0), 0).verdict == crit.FAILS
    h = Hierarchical(b=(1.0, 1.0))
    assert crit.boundary_uniformity_series(IsingPotential(h, 1.0), 0).verdict == crit.UNIQUE


def test_johansson_oberg_banner():
    for p in (1.6, 1.75, 1.9):
        rep = crit.johansson_oberg(IsingPotential(PowerLaw(p), 1.0), 0, depth=4)
        assert rep.satisfied and rep.verdict == crit.UNDECIDED
        assert crit.JO_BANNER in rep.flags
    rep = crit.johansson_oberg(IsingPotential(PowerLaw(1.4), 1.0), 0, depth=4)
    assert rep.satisfied is False and not rep.flags


def test_one_sided_dobrushin():
    rep = crit.one_sided_dobrushin(IsingPotential(PowerLaw(2.0), 0.1), 0, depth=4)
    # bound = beta * sum_{r >= 1} r**-2
    assert rep.values["bound_sum"] == pytest.approx(0.1 * math.pi**2 / 6, rel=1e-12)
    assert rep.satisfied
    rep = crit.one_sided_dobrushin(IsingPotential(PowerLaw(2.0), 5.0), 0, depth=4)
    assert rep.satisfied is False
    assert rep.values["beta_threshold"] == pytest.approx(6 / math.pi**2)


def test_global_conditions():
    assert crit.ising_uniqueness_condition(PowerLaw(2.5)).verdict == crit.UNIQUE
    assert crit.ising_uniqueness_condition(PowerLaw(1.5)).verdict == crit.FAILS
    assert crit.dyson_transition_condition(PowerLaw(1.5)).verdict == crit.TRANSITION
    assert crit.dyson_transition_condition(PowerLaw(2.0)).verdict == crit.FAILS
    assert crit.dyson_transition_condition(Table(((-1, 0, -1.0),))).verdict == crit.FAILS
    kt = crit.kac_thompson(PowerLog(2.0, 1.0))
    assert kt.classification.verdict == "Diverges" and crit.KT_FLAG in kt.flags
    assert crit.kac_thompson(PowerLaw(2.5)).classification.verdict == "Converges"


def test_g_function():
    g = crit.g_function(PowerLaw(2.5), 1000)
    # g(j) = sum_r min(j, r) J(r)
    r = np.arange(1, 400_000, dtype=float)
    for j in (1, 10, 500):
        assert g[j - 1] == pytest.approx(np.sum(np.minimum(j, r) * r**-2.5), rel=1e-6)
    assert crit.g_growth_exponent(PowerLaw(1.5)) == pytest.approx(0.5, abs=0.05)


def test_hierarchical_sums():
    h = Hierarchical(alpha=1.5)
    sig, star, rep = crit.hierarchical_sums(h, beta=0.1)
    brute = sum(2.0 ** (0.5 * p) * 2.0 ** (1 - 2 * p) * (2.0**p - 1) for p in range(1, 400))
    assert sig == pytest.approx(brute, rel=1e-12)
    assert rep.verdict == crit.TRANSITION and math.isfinite(star)
    assert rep.values["unique_at_beta"] == (0.1 * sig < 1)
    assert crit.hierarchical_sums(Hierarchical(alpha=2.5))[2].verdict == crit.UNIQUE
    assert crit.hierarchical_sums(Hierarchical(alpha=0.8))[2].verdict == crit.ASSUMPTION_VIOLATED


def test_finite_lss_inputs():
    f = random_lss_pair(-3, 3, 4)
    for fn in (crit.cff, crit.harris_stenflo, crit.boundary_uniformity_series,
               crit.johansson_oberg, crit.one_sided_dobrushin):
        rep = fn(f, 0)
        assert rep.verdict == crit.UNDECIDED
        assert rep.as_dict()["inputs"]["lss"] == "finite"


def test_not_summable_and_parse():
    with pytest.raises(ValueError):
        crit.cff(IsingPotential(PowerLaw(0.9), 1.0), 0)
    assert crit.power_law_classify(0.5).verdict == crit.NOT_WELL_DEFINED
    assert crit.parse_model({"type": "power_law", "p": 2}) == PowerLaw(2.0)
    assert crit.parse_model({"type": "hierarchical", "alpha": 1.5}) == Hierarchical(alpha=1.5)
    assert isinstance(crit.parse_model({"type": "table", "entries": [[-1, 0, 1.0]]}), Table)
    with pytest.raises(ValueError):
        crit.parse_model({"type": "nope"})


def test_regime_report_p2_is_marginal():
    rep = crit.regime_report(PowerLaw(2.0))
    assert rep.verdict == crit.UNDECIDED and rep.notes
