"""Uniqueness and phase-transition criteria for Ising and hierarchical chains.

Each evaluator returns a ``CriterionReport`` whose verdict is one of

* ``UniquenessCertified``: a valid sufficient condition for uniqueness holds;
* ``TransitionAtLowTemp``: a valid sufficient condition for multiplicity holds;
* ``ConditionFails``: the tested condition is decisively not met;
* ``Inconclusive``: no decision, or the tested statement is not a valid
  criterion in the non-shift-invariant setting (``satisfied`` still reports
  whether its condition holds);
* ``NotWellDefined`` / ``AssumptionViolated``: the model is outside the
  hypotheses (non-summable couplings, divergent hierarchical sum).

Series verdicts come from the analytic decay of the couplings (see
``series``).  Per-site series mix exactly computed coefficients at small lags
with the Ising upper bounds at large lags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from halfchain.correspondence import FiniteLSS
from halfchain.couplings import (CouplingModel, Hierarchical, IsingPotential, PowerLaw,
                                 PowerLog, is_radially_nonincreasing)
from halfchain.sensitivity import ExtremalTails, IsingSource, sensitivity_row
from halfchain.series import (CHECKPOINTS, CONVERGES, DIVERGES, INCONCLUSIVE, FINITE,
                              PARTIAL_ONLY, SeriesClassification, TailModel, classify, decide,
                              exp_neg_tail, fitted_exponent, growth_of_sum)

UNIQUE = "UniquenessCertified"
TRANSITION = "TransitionAtLowTemp"
FAILS = "ConditionFails"
UNDECIDED = "Inconclusive"
NOT_WELL_DEFINED = "NotWellDefined"
ASSUMPTION_VIOLATED = "AssumptionViolated"

DEFAULT_SITES = (0, -4, -8)
DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)
NEAR_DEPTH = 8
N_TERMS = max(CHECKPOINTS)

JO_BANNER = "johansson_oberg_counterexample"
KT_FLAG = "kac_thompson_counterexample"


class VerdictContradiction(RuntimeError):
    """Uniqueness at all temperatures and a low-temperature transition were both certified."""


@dataclass
class CriterionReport:
    criterion: str
    inputs: dict
    verdict: str
    classification: SeriesClassification | None = None
    satisfied: bool | None = None
    values: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {"criterion": self.criterion, "inputs": self.inputs, "verdict": self.verdict,
                "satisfied": self.satisfied,
                "classification": None if self.classification is None else self.classification.as_dict(),
                "values": self.values, "flags": list(self.flags), "notes": list(self.notes)}


def model_inputs(model: CouplingModel, beta=None, i=None) -> dict:
    out = {"model": model.label()}
    if beta is not None:
        out["beta"] = beta
    if i is not None:
        out["i"] = i
    return out


# tail sums and asymptotics of the couplings

def profile_tail_sums(model: CouplingModel, dmax: int) -> np.ndarray:
    """T[d] = sum_{r >= d} J(r) of the radial profile for d = 0..dmax (T[0] = T[1]).

    Exact for power laws and hierarchical models, certified upper bounds otherwise.
    """
    d = np.arange(1, dmax + 1)
    if isinstance(model, PowerLaw):
        T = np.asarray(model.tail_sum(d), dtype=float)
    else:
        extra = 4096
        prof = np.asarray(model.profile(np.arange(1, dmax + extra + 1)), dtype=float)
        suf = np.cumsum(prof[::-1])[::-1]
        T = suf[:dmax] + model.tail_bound(dmax + extra)
    return np.concatenate([[T[0]], T])


def tail_asymptotics(model: CouplingModel):
    """(coef, s', t') with sum_{r >= d} J(r) ~ coef d**-s' (log d)**-t', or None.

    Returns ``"finite"`` for finite-range models.
    """
    if model.finite_range is not None:
        return "finite"
    meta = model.decay_meta
    if meta is None:
        return None
    if meta.s > 1:
        return meta.C / (meta.s - 1), meta.s - 1, meta.t
    if meta.s == 1 and meta.t > 1:
        return meta.C / (meta.t - 1), 0.0, meta.t - 1
    return math.inf, math.nan, math.nan


def _far_bounds(model, beta, i, n_terms):
    """var and osc upper bounds at lags n = i - k = 1..n_terms (index n - 1)."""
    m = abs(i) + 1
    T = profile_tail_sums(model, n_terms + m + 1)
    prof = np.concatenate([[0.0], np.asarray(model.profile(np.arange(1, n_terms + m + 1)), float)])
    n = np.arange(1, n_terms + 1)
    vb = np.zeros(n_terms)
    ob = np.zeros(n_terms)
    for e in range(m):
        vb += T[np.maximum(n - 1 + e, 1)]
        ob += prof[n + e]
    return beta * vb, beta * ob


def _near_rows(src, i, depth, method=None):
    rows = []
    for n in range(1, depth + 1):
        rows.append(sensitivity_row(src, i, i - n, method or ExtremalTails()))
    return rows


def _require_summable(model):
    if not model.summable():
        raise ValueError(f"{model.label()}: couplings are not summable, the potential is not well defined")


def _lag_series(pot: IsingPotential, i: int, depth: int, n_terms: int):
    """Exact rows for lags 1..depth, plus far upper bounds for all lags."""
    _require_summable(pot.model)
    rows = _near_rows(IsingSource(pot), i, depth) if pot.beta > 0 else []
    vb, ob = _far_bounds(pot.model, pot.beta, i, n_terms)
    return rows, vb, ob


def _checkpoint_sums(terms: np.ndarray) -> dict:
    cs = np.cumsum(terms)
    return {int(N): float(cs[N - 1]) for N in CHECKPOINTS if N <= len(terms)}


def _finite_lss_rows(f: FiniteLSS, i: int):
    return [sensitivity_row(f, i, k) for k in range(i - 1, f.ls - 1, -1)]


# per-site criteria

def cff(src, i: int = 0, depth: int = NEAR_DEPTH, n_terms: int = N_TERMS) -> CriterionReport:
    """sum_{j<i} prod_{k=j}^{i-1} a_k(f_i) = infinity (for all i)."""
    if isinstance(src, FiniteLSS):
        a = np.array([r.a for r in _finite_lss_rows(src, i)])
        prods = np.cumprod(a) if len(a) else np.ones(0)
        ok = bool(np.all(a > 0))
        return CriterionReport("cff", {"lss": "finite", "i": i}, UNDECIDED, None, ok,
                               {"a": a.tolist(), "products": prods.tolist()},
                               notes=["finite-window object: the past below the window is fixed, "
                                      "so the products are eventually constant"])
    pot = src
    model = pot.model
    inputs = model_inputs(model, pot.beta, i)
    if pot.beta == 0:
        terms = np.ones(n_terms)
        cls = SeriesClassification(DIVERGES, "AnalyticExponent", _checkpoint_sums(terms), TailModel(0.0))
        return CriterionReport("cff", inputs, UNIQUE, cls, True, {"a_near": []})
    rows, vb, _ = _lag_series(pot, i, depth, n_terms)
    a = np.clip(1.0 - vb, 0.0, 1.0)
    a_near = np.array([r.a for r in rows])
    a[: len(a_near)] = a_near
    if np.any(a_near == 0):
        return CriterionReport("cff", inputs, FAILS, None, False, {"a_near": a_near.tolist()},
                               notes=["a_k = 0 at a near lag"])
    terms = np.cumprod(a)
    sums = _checkpoint_sums(terms)
    asym = tail_asymptotics(model)
    notes = ["far-lag a_k replaced by the lower bound 1 - var bound",
             "products of (1 - x) compared with exp(-x) as x -> 0"]
    values = {"a_near": a_near.tolist()}
    if asym == "finite":
        G = growth_of_sum(0.0, 2.0, 0.0)
    elif asym is None or not math.isfinite(asym[0]):
        cls = SeriesClassification(INCONCLUSIVE, PARTIAL_ONLY, sums, None, ["no decay information"])
        return CriterionReport("cff", inputs, UNDECIDED, cls, None, values, notes=notes)
    else:
        coef, s1, t1 = asym
        G = growth_of_sum(pot.beta * (abs(i) + 1) * coef, s1, t1)
    tm = exp_neg_tail(1.0, G)
    verdict, basis = decide(tm)
    values["growth"] = {"kind": G.kind, "c": G.c, "gamma": G.gamma}
    cls = SeriesClassification(verdict, basis, sums, tm, [])
    if verdict == DIVERGES:
        i_free = G.kind in ("bounded", "loglog") or (G.kind == "logpow" and G.gamma < 1)
        if i_free:
            return CriterionReport("cff", inputs, UNIQUE, cls, True, values, notes=notes)
        notes.append("divergence depends on i through the factor (|i|+1); not certified for all i")
        return CriterionReport("cff", inputs, UNDECIDED, cls, True, values, notes=notes)
    notes.append("the lower bound on the series converges; the criterion cannot be confirmed")
    return CriterionReport("cff", inputs, UNDECIDED, cls, None, values, notes=notes)


def harris_stenflo(src, i: int = 0, depth: int = NEAR_DEPTH, n_terms: int = N_TERMS):
    """Per-site Harris and Stenflo series; for binary alphabets they coincide with CFF."""
    if isinstance(src, FiniteLSS):
        rows = _finite_lss_rows(src, i)
        q = src.q
        h = np.cumprod([1.0 - q / 2.0 * r.var for r in rows]) if rows else np.ones(0)
        s = np.cumprod([r.b for r in rows]) if rows else np.ones(0)
        ok_h = bool(np.all(h > 0))
        ok_s = bool(np.all(s > 0))
        return CriterionReport("harris_stenflo", {"lss": "finite", "i": i, "q": q}, UNDECIDED, None,
                               ok_h and ok_s,
                               {"harris_products": h.tolist(), "stenflo_products": s.tolist(),
                                "harris_sum": float(h.sum()), "stenflo_sum": float(s.sum())},
                               notes=["non-shift-invariant adaptation"])
    pot = src
    base = cff(pot, i, depth, n_terms)
    values = dict(base.values)
    if pot.beta > 0:
        rows, vb, _ = _lag_series(pot, i, depth, n_terms)
        far = np.clip(1.0 - vb, 0.0, 1.0)
        harris, stenflo = far.copy(), far.copy()
        harris[: len(rows)] = [1.0 - r.var for r in rows]
        stenflo[: len(rows)] = [r.b for r in rows]
        values["harris_partial_sums"] = _checkpoint_sums(np.cumprod(harris))
        values["stenflo_partial_sums"] = _checkpoint_sums(np.cumprod(stenflo))
    return CriterionReport("harris_stenflo", base.inputs, base.verdict, base.classification,
                           base.satisfied, values, ["delegated_to_cff"],
                           base.notes + ["binary alphabet: coincides with CFF"])


def boundary_uniformity_series(src, i: int = 0, depth: int = NEAR_DEPTH,
                               n_terms: int = N_TERMS) -> CriterionReport:
    """sum_{j<i} var_j(f_i) < infinity (for all i)."""
    if isinstance(src, FiniteLSS):
        v = [r.var for r in _finite_lss_rows(src, i)]
        return CriterionReport("boundary_uniformity", {"lss": "finite", "i": i}, UNDECIDED, None,
                               True, {"sum": float(sum(v))}, notes=["finite sum"])
    pot = src
    inputs = model_inputs(pot.model, pot.beta, i)
    if pot.beta == 0:
        cls = SeriesClassification(CONVERGES, FINITE, {N: 0.0 for N in CHECKPOINTS})
        return CriterionReport("boundary_uniformity", inputs, UNIQUE, cls, True)
    rows, vb, _ = _lag_series(pot, i, depth, n_terms)
    terms = vb.copy()
    terms[: len(rows)] = [r.var for r in rows]
    sums = _checkpoint_sums(terms)
    asym = tail_asymptotics(pot.model)
    if asym == "finite":
        cls = SeriesClassification(CONVERGES, FINITE, sums)
    elif asym is None or not math.isfinite(asym[0]):
        cls = SeriesClassification(INCONCLUSIVE, PARTIAL_ONLY, sums)
    else:
        tm = TailModel(asym[1], asym[2])
        cls = SeriesClassification(*decide(tm), sums, tm)
    notes = ["far lags use the var upper bound"]
    if cls.verdict == CONVERGES:
        return CriterionReport("boundary_uniformity", inputs, UNIQUE, cls, True, notes=notes)
    if cls.verdict == DIVERGES:
        notes.append("the upper-bound series diverges")
        return CriterionReport("boundary_uniformity", inputs, FAILS, cls, False, notes=notes)
    return CriterionReport("boundary_uniformity", inputs, UNDECIDED, cls, None, notes=notes)


def johansson_oberg(src, i: int = 0, depth: int = NEAR_DEPTH, n_terms: int = N_TERMS,
                    transition: bool | None = None) -> CriterionReport:
    """Per-site sum_{j<i} var_j(f_i)**2 < infinity.

    This per-site adaptation is not a valid uniqueness criterion, so the
    verdict stays Inconclusive; ``satisfied`` reports the condition.  When
    ``transition`` is True (or is found by the Dyson condition) and the
    condition holds, the counterexample banner is attached.
    """
    if isinstance(src, FiniteLSS):
        v = [r.var**2 for r in _finite_lss_rows(src, i)]
        return CriterionReport("johansson_oberg", {"lss": "finite", "i": i}, UNDECIDED, None, True,
                               {"sum": float(sum(v))}, notes=["finite sum"])
    pot = src
    inputs = model_inputs(pot.model, pot.beta, i)
    notes = ["non-shift-invariant adaptation; not a valid criterion in this setting"]
    if pot.beta == 0:
        cls = SeriesClassification(CONVERGES, FINITE, {N: 0.0 for N in CHECKPOINTS})
        return CriterionReport("johansson_oberg", inputs, UNDECIDED, cls, True, notes=notes)
    rows, vb, _ = _lag_series(pot, i, depth, n_terms)
    terms = np.minimum(vb, 1.0) ** 2
    terms[: len(rows)] = [r.var**2 for r in rows]
    sums = _checkpoint_sums(terms)
    asym = tail_asymptotics(pot.model)
    if asym == "finite":
        cls = SeriesClassification(CONVERGES, FINITE, sums)
    elif asym is None or not math.isfinite(asym[0]):
        cls = SeriesClassification(INCONCLUSIVE, PARTIAL_ONLY, sums)
    else:
        tm = TailModel(2 * asym[1], 2 * asym[2])
        cls = SeriesClassification(*decide(tm), sums, tm)
    satisfied = {CONVERGES: True, DIVERGES: False}.get(cls.verdict)
    flags = []
    if transition is None:
        transition = dyson_transition_condition(pot.model).verdict == TRANSITION
    if satisfied and transition:
        flags.append(JO_BANNER)
        notes.append("condition holds while the model has a low-temperature transition: "
                     "the per-site version of this criterion is false")
    return CriterionReport("johansson_oberg", inputs, UNDECIDED, cls, satisfied, flags=flags,
                           notes=notes)


def one_sided_dobrushin(src, i: int = 0, depth: int = NEAR_DEPTH,
                        n_terms: int = N_TERMS) -> CriterionReport:
    """Per-site sum_{j<i} osc_j(f_i) < 1.

    ``bound_sum`` is the certified upper bound beta sum_{j=i}^0 sum_{k<i} |J(j,k)|;
    ``near_sum`` adds the computed (lower-bound) oscillations at small lags.
    """
    if isinstance(src, FiniteLSS):
        s = sum(r.osc for r in _finite_lss_rows(src, i))
        return CriterionReport("one_sided_dobrushin", {"lss": "finite", "i": i}, UNDECIDED, None,
                               s < 1, {"sum": float(s)}, notes=["finite sum"])
    pot = src
    inputs = model_inputs(pot.model, pot.beta, i)
    _require_summable(pot.model)
    m = abs(i) + 1
    T = profile_tail_sums(pot.model, m + 1)
    per_beta = float(sum(T[e + 1] for e in range(m)))
    bound = pot.beta * per_beta
    near = 0.0
    if pot.beta > 0:
        rows = _near_rows(IsingSource(pot), i, depth)
        near = float(sum(r.osc for r in rows))
    values = {"bound_sum": bound, "near_sum": near,
              "beta_threshold": (1.0 / per_beta) if per_beta > 0 else math.inf}
    if bound < 1:
        satisfied = True
    elif near >= 1:
        satisfied = False
    else:
        satisfied = None
    notes = ["per-site sums; the threshold shrinks with |i| through the factor (|i|+1)"]
    return CriterionReport("one_sided_dobrushin", inputs, UNDECIDED, None, satisfied, values,
                           ["i_dependent"], notes)


# global conditions on the couplings

def g_function(model: CouplingModel, jmax: int = N_TERMS) -> np.ndarray:
    """g(j) = sum_r min(j, r) J(r) for j = 1..jmax (= sum_{k<=j} sum_{r>=k} J(r))."""
    T = profile_tail_sums(model, jmax)
    return np.cumsum(T[1:])


def g_growth_exponent(model: CouplingModel, jmax: int = N_TERMS) -> float:
    """Fitted exponent of g on dyadic j in [jmax/64, jmax]."""
    g = g_function(model, jmax)
    js = np.array([jmax // 64, jmax // 32, jmax // 16, jmax // 8, jmax // 4, jmax // 2, jmax])
    slope = np.polyfit(np.log(js), np.log(g[js - 1]), 1)[0]
    return float(slope)


def ising_uniqueness_condition(model: CouplingModel, C_grid=DEFAULT_C_GRID) -> CriterionReport:
    """sum_j exp(-C g(j)) = infinity for every C > 0."""
    _require_summable(model)
    inputs = {"model": model.label(), "C_grid": list(C_grid)}
    g = g_function(model)
    asym = tail_asymptotics(model)
    per_c = {}
    if asym is None:
        for C in C_grid:
            per_c[str(C)] = classify(None).as_dict() | {"partial_sums": _checkpoint_sums(np.exp(-C * g))}
        return CriterionReport("uniq_cond", inputs, UNDECIDED, None, None, {"per_C": per_c},
                               notes=["no decay information"])
    if asym == "finite":
        G = growth_of_sum(0.0, 2.0, 0.0)
    else:
        coef, s1, t1 = asym
        G = growth_of_sum(coef, s1, t1)
    verdicts = []
    for C in C_grid:
        tm = exp_neg_tail(C, G)
        v, basis = decide(tm)
        verdicts.append(v)
        per_c[str(C)] = SeriesClassification(v, basis, _checkpoint_sums(np.exp(-C * g)), tm).as_dict()
    c_free = G.kind in ("bounded", "loglog") or (G.kind == "logpow" and G.gamma < 1)
    values = {"per_C": per_c, "growth": {"kind": G.kind, "c": G.c, "gamma": G.gamma},
              "g_exponent": g_growth_exponent(model)}
    if all(v == DIVERGES for v in verdicts) and c_free:
        return CriterionReport("uniq_cond", inputs, UNIQUE, None, True, values,
                               notes=["divergence holds for every C > 0 by the growth class of g"])
    if any(v == CONVERGES for v in verdicts):
        return CriterionReport("uniq_cond", inputs, FAILS, None, False, values)
    return CriterionReport("uniq_cond", inputs, UNDECIDED, None, None, values)


def dyson_transition_condition(model: CouplingModel) -> CriterionReport:
    """sum_r log log(r + 4) / (r**3 J(r)) < infinity for ferromagnetic decreasing couplings."""
    inputs = {"model": model.label()}
    _require_summable(model)
    notes = []
    if not model.ferromagnetic:
        return CriterionReport("phtr_cond", inputs, FAILS, None, False,
                               notes=["couplings are not ferromagnetic"])
    if not is_radially_nonincreasing(model, 10_000):
        return CriterionReport("phtr_cond", inputs, FAILS, None, False,
                               notes=["radial profile is not nonincreasing"])

    def term(r):
        J = np.asarray(model.profile(r), dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(J > 0, np.log(np.log(r + 4)) / (r**3 * np.where(J > 0, J, 1.0)), np.inf)

    if model.finite_range is not None:
        cls = SeriesClassification(DIVERGES, FINITE, {}, None, ["J(r) = 0 beyond the range"])
        return CriterionReport("phtr_cond", inputs, FAILS, cls, False)
    meta = model.decay_meta
    if meta is None:
        cls = classify(term)
        return CriterionReport("phtr_cond", inputs, UNDECIDED, cls, None)
    cls = classify(term, TailModel(3 - meta.s, -meta.t, -1.0))
    if cls.verdict == CONVERGES:
        return CriterionReport("phtr_cond", inputs, TRANSITION, cls, True, notes=notes)
    return CriterionReport("phtr_cond", inputs, FAILS, cls, False, notes=notes)


def kac_thompson(model: CouplingModel) -> CriterionReport:
    """sum_r r J(r); reported next to the uniqueness condition."""
    inputs = {"model": model.label()}
    _require_summable(model)

    def term(r):
        return r * np.asarray(model.profile(r), dtype=float)

    if model.finite_range is not None:
        cls = classify(term, finite_support=model.finite_range)
    elif model.decay_meta is None:
        cls = classify(term)
    else:
        cls = classify(term, TailModel(model.decay_meta.s - 1, model.decay_meta.t))
    uniq = ising_uniqueness_condition(model)
    flags = []
    notes = ["the conjecture predicts uniqueness iff this sum converges"]
    if cls.verdict == DIVERGES and uniq.verdict == UNIQUE:
        flags.append(KT_FLAG)
        notes.append("sum diverges while uniqueness is certified: the conjecture fails on the half line")
    return CriterionReport("kac_thompson", inputs, UNDECIDED, cls,
                           {CONVERGES: True, DIVERGES: False}.get(cls.verdict),
                           {"uniq_cond_verdict": uniq.verdict}, flags, notes)


# hierarchical model

def hierarchical_sums(model: Hierarchical, beta=None):
    """(Sigma(b), Sigma*(b), report) with Sigma(b) = sum 2**(1-2p) b_p (2**p - 1), Sigma* = sum log(1+p)/b_p."""
    K = model.K
    a = model.alpha
    sig = sum(model.b_q(p) * 2.0 ** (1 - 2 * p) * (2.0**p - 1) for p in range(1, K + 1))
    if a is not None:
        if a <= 1:
            sig = math.inf
        else:
            # sum_{p > K} 2**(1 - a p) (2**p - 1), two geometric series
            x, y = 2.0 ** (1 - a), 2.0 ** (-a)
            sig += 2 * (x ** (K + 1) / (1 - x) - y ** (K + 1) / (1 - y))
    if any(model.b_q(p) <= 0 for p in range(1, K + 1)) or a is None or a >= 2:
        star = math.inf
    else:
        star = sum(math.log(1 + p) / model.b_q(p) for p in range(1, K + 1))
        ratio = 2.0 ** (a - 2)
        p = np.arange(K + 1, K + 4001, dtype=float)
        star += float(np.sum(np.log1p(p) * ratio**p))
    bounded = a is None or a >= 2
    inputs = {"model": model.label()}
    if beta is not None:
        inputs["beta"] = beta
    values = {"Sigma": sig, "Sigma_star": star, "b_bounded": bounded,
              "beta_uniqueness": (1.0 / sig) if 0 < sig < math.inf else math.inf,
              "beta_multiplicity": 8 * star}
    if not math.isfinite(sig):
        rep = CriterionReport("hierarchical", inputs, ASSUMPTION_VIOLATED, None, False, values,
                              notes=["Sigma(b) diverges"])
        return sig, star, rep
    notes = []
    if bounded:
        verdict = UNIQUE
        notes.append("b_p bounded: uniqueness at all temperatures")
    elif math.isfinite(star):
        verdict = TRANSITION
        notes.append("uniqueness for beta Sigma(b) < 1, multiplicity for beta > 8 Sigma*(b)")
    else:
        verdict = UNDECIDED
    if beta is not None:
        values["unique_at_beta"] = bool(bounded or beta * sig < 1)
        values["multiple_at_beta"] = bool(math.isfinite(star) and beta > 8 * star)
    if a is not None and model.b is None:
        values["transition_window"] = bool(1 < a < 2)
    return sig, star, CriterionReport("hierarchical", inputs, verdict, None, True, values,
                                      notes=notes)


# regimes

def power_law_classify(p: float, beta_grid=(0.1, 1.0, 10.0)) -> CriterionReport:
    """Regime of the power-law chain J(r) = r**-p."""
    inputs = {"model": f"power_law(p={p:g})", "beta_grid": list(beta_grid)}
    if p <= 1:
        return CriterionReport("power_law", inputs, NOT_WELL_DEFINED, None, False,
                               notes=["couplings are not summable for p <= 1"])
    return regime_report(PowerLaw(p), beta_grid)


def regime_report(model: CouplingModel, beta_grid=(0.1, 1.0, 10.0)) -> CriterionReport:
    """Combine the global criteria into one regime verdict for ``model``."""
    inputs = {"model": model.label(), "beta_grid": list(beta_grid)}
    if isinstance(model, Hierarchical):
        if model.alpha is not None and model.alpha <= 1:
            return CriterionReport("regime", inputs, ASSUMPTION_VIOLATED, None, None,
                                   notes=["Sigma(b) diverges"])
        _, _, rep = hierarchical_sums(model)
        rep.criterion = "regime"
        rep.inputs = inputs
        return rep
    if not model.summable():
        return CriterionReport("regime", inputs, NOT_WELL_DEFINED, None, None,
                               notes=["couplings are not summable"])
    dyson = dyson_transition_condition(model)
    uniq = ising_uniqueness_condition(model)
    kt = kac_thompson(model)
    if dyson.verdict == TRANSITION and uniq.verdict == UNIQUE:
        raise VerdictContradiction(f"{model.label()}: both uniqueness and transition certified")
    flags = list(kt.flags)
    notes = []
    if dyson.verdict == TRANSITION:
        verdict = TRANSITION
        notes.append("uniqueness at high temperature")
        jo = johansson_oberg(IsingPotential(model, 1.0), 0, depth=4, transition=True)
        flags += jo.flags
    elif uniq.verdict == UNIQUE:
        verdict = UNIQUE
    else:
        verdict = UNDECIDED
        if isinstance(model, PowerLaw) and model.p == 2:
            notes.append("p = 2 is the marginal case, outside the scope of these criteria")
    values = {"phtr_cond": dyson.verdict, "uniq_cond": uniq.verdict,
              "kac_thompson_sum": kt.classification.verdict if kt.classification else None}
    return CriterionReport("regime", inputs, verdict, None, None, values, flags, notes)


def parse_model(spec: dict) -> CouplingModel:
    """Coupling model from a config block; raises ValueError for p <= 1 power laws."""
    kind = spec["type"]
    if kind == "power_law":
        return PowerLaw(float(spec["p"]))
    if kind == "power_log":
        return PowerLog(float(spec["s"]), float(spec.get("t", 0.0)))
    if kind == "hierarchical":
        b = spec.get("b")
        return Hierarchical(spec.get("alpha"), None if b is None else tuple(b))
    if kind == "table":
        from halfchain.couplings import Table
        return Table(tuple(tuple(e) for e in spec["entries"]))
    raise ValueError(f"unknown model type {kind!r}")


def regimes_table(models) -> list[dict]:
    """Rows (model, parameter, verdict, flags) for a list of (label, parameter, model-or-None)."""
    rows = []
    for label, parameter, model in models:
        if model is None:
            rows.append({"model": label, "parameter": parameter, "verdict": NOT_WELL_DEFINED,
                         "flags": ""})
            continue
        rep = regime_report(model)
        rows.append({"model": label, "parameter": parameter, "verdict": rep.verdict,
                     "flags": ";".join(rep.flags)})
    return rows


def default_regime_models():
    """The reference regime set: power laws, hierarchical chains and the log-corrected example."""
    out = []
    for p in (0.9, 1.2, 1.5, 1.6, 1.75, 1.8, 1.9, 2.0, 2.5, 3.0):
        out.append(("power_law", f"p={p:g}", PowerLaw(p) if p > 1 else None))
    for a in (0.8, 1.5, 2.5):
        out.append(("hierarchical", f"alpha={a:g}", Hierarchical(alpha=a)))
    out.append(("power_log", "s=2,t=1", PowerLog(2.0, 1.0)))
    return out
