"""Convergence classification of positive series from an analytic tail model plus partial sums.

A tail model (s, t, u) says the terms behave like n**-s (log n)**-t (log log n)**-u
up to constants.  Decision rule: s > 1 converges, s < 1 diverges, and s == 1
is reduced by Cauchy condensation to the model (t, u, 0).  Partial sums are
recorded as a trace but never decide convergence on their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

CHECKPOINTS = (100, 1_000, 10_000, 100_000)

CONVERGES = "Converges"
DIVERGES = "Diverges"
INCONCLUSIVE = "Inconclusive"

ANALYTIC = "AnalyticExponent"
CONDENSATION = "CauchyCondensation"
PARTIAL_ONLY = "PartialSumsOnly"
FINITE = "FiniteSupport"


@dataclass(frozen=True)
class TailModel:
    s: float
    t: float = 0.0
    u: float = 0.0

    def as_tuple(self):
        return (self.s, self.t, self.u)


def decide(model: TailModel) -> tuple[str, str]:
    """(verdict, basis) for a positive series with terms following ``model``."""
    s, t, u = model.as_tuple()
    basis = ANALYTIC
    for _ in range(4):
        if math.isnan(s):
            return INCONCLUSIVE, PARTIAL_ONLY
        if s > 1:
            return CONVERGES, basis
        if s < 1:
            return DIVERGES, basis
        s, t, u = t, u, 0.0
        basis = CONDENSATION
    return DIVERGES, basis  # (1, 1, 1) -> (1, 1, 0) -> (1, 0, 0) -> (0, 0, 0)


@dataclass
class SeriesClassification:
    verdict: str
    basis: str
    partial_sums: dict = field(default_factory=dict)
    tail_model: TailModel | None = None
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {"verdict": self.verdict, "basis": self.basis,
                "partial_sums": {str(k): v for k, v in self.partial_sums.items()},
                "tail_model": None if self.tail_model is None else list(self.tail_model.as_tuple()),
                "notes": list(self.notes)}


def partial_sums(term: Callable[[np.ndarray], np.ndarray], start: int = 1,
                 checkpoints=CHECKPOINTS) -> dict:
    """S_N = sum_{n=start}^{N} term(n) at each checkpoint N."""
    top = int(max(checkpoints))
    n = np.arange(start, top + 1, dtype=float)
    vals = np.asarray(term(n), dtype=float)
    cs = np.cumsum(vals)
    return {int(N): float(cs[int(N) - start]) for N in checkpoints if N >= start}


def fitted_exponent(term, n1: float = 1e4, n2: float = 1e5) -> float:
    """Local power-law exponent -d log(term)/d log n between n1 and n2."""
    a, b = float(np.asarray(term(np.array([n1])))[0]), float(np.asarray(term(np.array([n2])))[0])
    if a <= 0 or b <= 0:
        return math.inf
    return -math.log(b / a) / math.log(n2 / n1)


def classify(term=None, tail_model: TailModel | None = None, start: int = 1,
             finite_support: int | None = None, checkpoints=CHECKPOINTS) -> SeriesClassification:
    """Classify sum_{n >= start} term(n).

    ``finite_support`` (last nonzero index) makes the verdict Converges
    outright.  Without a tail model the verdict is Inconclusive.
    """
    sums = partial_sums(term, start, checkpoints) if term is not None else {}
    notes = []
    if finite_support is not None:
        return SeriesClassification(CONVERGES, FINITE, sums, tail_model, notes)
    if tail_model is None:
        return SeriesClassification(INCONCLUSIVE, PARTIAL_ONLY, sums, None,
                                    ["no tail model; partial sums only"])
    verdict, basis = decide(tail_model)
    if term is not None and tail_model.t == 0 and tail_model.u == 0 and math.isfinite(tail_model.s):
        fit = fitted_exponent(term)
        if math.isfinite(fit) and abs(fit - tail_model.s) > 0.1:
            notes.append(f"fitted exponent {fit:.3f} differs from tail model s={tail_model.s:g}")
    return SeriesClassification(verdict, basis, sums, tail_model, notes)


def calibration_series():
    """Twelve reference series with known behaviour: (name, term, tail model, expected verdict)."""
    log = np.log
    out = []
    for s in (0.5, 0.9, 1.0, 1.1, 2.0, 3.0):
        out.append((f"n^-{s:g}", lambda n, s=s: n**-s, TailModel(s),
                    CONVERGES if s > 1 else DIVERGES))
    out += [
        ("1/(n log n)", lambda n: 1 / (n * log(n + 1)), TailModel(1, 1), DIVERGES),
        ("1/(n log^2 n)", lambda n: 1 / (n * log(n + 1) ** 2), TailModel(1, 2), CONVERGES),
        ("1/(n log^1.5 n)", lambda n: 1 / (n * log(n + 1) ** 1.5), TailModel(1, 1.5), CONVERGES),
        ("1/(n log^0.5 n)", lambda n: 1 / (n * log(n + 1) ** 0.5), TailModel(1, 0.5), DIVERGES),
        ("log n/n^2", lambda n: log(n + 1) / n**2, TailModel(2, -1), CONVERGES),
        ("log n/n", lambda n: log(n + 1) / n, TailModel(1, -1), DIVERGES),
    ]
    return out


# growth of G(j) = sum_{k <= j} x_k for x_k ~ c k**-s (log k)**-t

@dataclass(frozen=True)
class Growth:
    """Asymptotic class of an increasing sequence G(j).

    kind: ``bounded``, ``loglog`` (c log log j), ``logpow`` (c (log j)**gamma),
    ``pow`` (c j**gamma).
    """

    kind: str
    c: float = 0.0
    gamma: float = 0.0


def growth_of_sum(c: float, s: float, t: float) -> Growth:
    """Growth of sum_{k <= j} c k**-s (log k)**-t."""
    if c == 0:
        return Growth("bounded")
    if s > 1 or (s == 1 and t > 1):
        return Growth("bounded")
    if s == 1 and t == 1:
        return Growth("loglog", c)
    if s == 1:
        return Growth("logpow", c / (1 - t), 1 - t)
    return Growth("pow", c / (1 - s), 1 - s)


def exp_neg_tail(C: float, G: Growth) -> TailModel:
    """Tail model of the terms exp(-C G(j))."""
    if G.kind == "bounded" or C == 0:
        return TailModel(0.0)
    if G.kind == "loglog":
        return TailModel(0.0, C * G.c)
    if G.kind == "logpow":
        if G.gamma < 1:
            return TailModel(0.0)  # slower than any power
        if G.gamma == 1:
            return TailModel(C * G.c)
        return TailModel(math.inf)
    return TailModel(math.inf)
