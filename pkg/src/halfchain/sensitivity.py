"""Past-sensitivity coefficients var_k, osc_k, a_k, b_k of LSS kernels, and Ising bounds.

Lag convention.  For var_k, a_k and b_k the two conditionings share the
past on [k + 1, i - 1] and may differ on every site <= k.  For osc_k they
differ at site k only.  With this common convention a_k = b_k = 1 - var_k
holds exactly for binary alphabets.

Tails can only be explored finitely:

* ``ExtremalTails``: the two constant tails (all plus, all minus) at sites <= k.
  For ferromagnetic Ising kernels the conditional probability of +1 is
  monotone in the past, so var, a and b are exact.  osc is a lower bound.
* ``ExhaustiveTails(depth)``: every configuration on [k - depth + 1, k], closed
  by each constant tail.  var/osc are lower bounds, a/b upper bounds.
* ``AnalyticBound``: the Ising upper bounds on osc and var (a, b = 1 - var bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from halfchain.core import DEFAULT_CAP, BoundaryCondition, CapExceeded, check_site
from halfchain.correspondence import FiniteLSS
from halfchain.couplings import (Hierarchical, IsingPotential, Table, coupling,
                                 is_radially_nonincreasing)
from halfchain.kernels import ExteriorSpec, IsingSystem


@dataclass(frozen=True)
class ExtremalTails:
    def __str__(self):
        return "extremal_tails"


@dataclass(frozen=True)
class ExhaustiveTails:
    depth: int = 6

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("exhaustive depth must be >= 1")

    def __str__(self):
        return f"exhaustive_tails({self.depth})"


@dataclass(frozen=True)
class AnalyticBound:
    shortcut: bool = False

    def __str__(self):
        return "analytic_bound" + ("(shortcut)" if self.shortcut else "")


Method = ExtremalTails | ExhaustiveTails | AnalyticBound


@dataclass
class SensitivityRow:
    i: int
    k: int
    var: float
    osc: float
    a: float
    b: float
    method: str
    var_bound: float = math.nan
    osc_bound: float = math.nan

    def as_dict(self):
        return {"i": self.i, "k": self.k, "var": self.var, "osc": self.osc, "a": self.a,
                "b": self.b, "method": self.method, "var_bound": self.var_bound,
                "osc_bound": self.osc_bound}


@dataclass(frozen=True)
class IsingSource:
    """An Ising LSS given by a potential; tails are truncated at depth D below k + 1."""

    pot: IsingPotential
    depth: int | None = None
    cap: int = DEFAULT_CAP

    def resolved_depth(self, i: int) -> int:
        return ExteriorSpec(BoundaryCondition.all_plus(), self.depth).resolved_depth(self.pot, 1 - i)


def _check(i, k):
    check_site(i)
    check_site(k)
    if not k < i:
        raise ValueError(f"lag k={k} must be < i={i}")


def _ising_variants(src: IsingSource, i: int, k: int, method):
    """Arrays F[tail, shared, symbol] and Fo[rest, site_k, shared, symbol]."""
    D = max(src.resolved_depth(i), 1)
    bcs = (BoundaryCondition.all_minus(), BoundaryCondition.all_plus())
    if isinstance(method, ExtremalTails):
        depth = 1
    else:
        depth = method.depth
    D = max(D, depth + 1)
    left = k - depth + 1
    if 1 - left > src.cap:
        raise CapExceeded(f"window [{left}, 0] exceeds the cap of {src.cap}")
    F, Fo = [], []
    for bc in bcs:
        ext = ExteriorSpec(bc, D, anchor=k + 1)
        if isinstance(method, ExtremalTails):
            t = IsingSystem(src.pot, k + 1, ext, src.cap).lss_tables()[i - k - 1]
            F.append(t[None])
        t = IsingSystem(src.pot, left, ext, src.cap).lss_tables()[i - left]
        S = 2 ** (i - k - 1)
        if isinstance(method, ExhaustiveTails):
            F.append(t.reshape(2**depth, S, 2))
        Fo.append(t.reshape(2 ** (depth - 1), 2, S, 2))
    return np.concatenate(F), np.concatenate(Fo)


def _lss_variants(f: FiniteLSS, i: int, k: int):
    q = f.q
    t = f.tables[i - f.ls]
    S = q ** (i - k - 1)
    if k < f.ls:
        # nothing below the window can vary
        return t[None], t[None, None]
    nk = k - f.ls + 1
    return t.reshape(q**nk, S, q), t.reshape(q ** (nk - 1), q, S, q)


def _coefficients(F: np.ndarray, Fo: np.ndarray):
    var = float((F.max(axis=0) - F.min(axis=0)).max())
    osc = float((Fo.max(axis=1) - Fo.min(axis=1)).max())
    a = float(F.min(axis=0).sum(axis=-1).min())
    b = math.inf
    for t in range(F.shape[0]):
        b = min(b, float(np.minimum(F[t][None], F).sum(axis=-1).min()))
    return var, osc, a, b


def sensitivity_row(src, i: int, k: int, method=None) -> SensitivityRow:
    """All four coefficients of f_i at lag k.

    ``src`` is an ``IsingSource``, an ``IsingPotential`` (wrapped with the
    default depth) or a ``FiniteLSS`` (exhaustive over its own window).
    """
    _check(i, k)
    if isinstance(src, IsingPotential):
        src = IsingSource(src)
    if isinstance(src, FiniteLSS):
        if i < src.ls:
            raise ValueError(f"site {i} is outside the LSS window")
        F, Fo = _lss_variants(src, i, k)
        var, osc, a, b = _coefficients(F, Fo)
        return SensitivityRow(i, k, var, osc, a, b, str(ExhaustiveTails(max(1, k - src.ls + 1))))
    method = method or ExtremalTails()
    osc_b, var_b = ising_bounds(src.pot, i, k)
    if isinstance(method, AnalyticBound):
        if method.shortcut:
            osc_b, var_b = ising_bounds(src.pot, i, k, shortcut=True)
        a = max(0.0, 1.0 - var_b)
        return SensitivityRow(i, k, min(var_b, 1.0), min(osc_b, 1.0), a, a, str(method), var_b, osc_b)
    F, Fo = _ising_variants(src, i, k, method)
    var, osc, a, b = _coefficients(F, Fo)
    return SensitivityRow(i, k, var, osc, a, b, str(method), var_b, osc_b)


def variation(src, i, k, method=None) -> float:
    return sensitivity_row(src, i, k, method).var


def oscillation(src, i, k, method=None) -> float:
    return sensitivity_row(src, i, k, method).osc


def a_coefficient(src, i, k, method=None) -> float:
    return sensitivity_row(src, i, k, method).a


def b_coefficient(src, i, k, method=None) -> float:
    return sensitivity_row(src, i, k, method).b


def left_coupling_sum(model, j: int, upto: int) -> float:
    """sum_{l <= upto, l != j} |J(j, l)|, exact or via exact tail sums."""
    if upto >= j:
        # split around j
        right = sum(abs(coupling(model, j, l)) for l in range(j + 1, upto + 1))
        return left_coupling_sum(model, j, j - 1) + right
    if isinstance(model, Table):
        return float(sum(abs(J) for a, b, J in model.entries
                         if (a == j and b <= upto) or (b == j and a <= upto)))
    if isinstance(model, Hierarchical):
        total = model.tail_bound(0)
        inner = sum(coupling(model, j, l) for l in range(upto + 1, 1) if l != j)
        return max(total - inner, 0.0)
    return float(np.atleast_1d(model.tail_sum(j - upto))[0])


def ising_bounds(pot: IsingPotential, i: int, k: int, shortcut: bool = False):
    """(osc bound, var bound) for the Ising LSS f_i at lag k.

    Full form: beta sum_{j=i}^0 |J(j,k)| and beta sum_{j=i}^0 sum_{l <= k+1} |J(j,l)|.
    Shortcut (radially nonincreasing couplings): beta (|i|+1) |J(i,k)| and
    beta (|i|+1) sum_{j <= k+1} |J(i,j)|.
    """
    _check(i, k)
    beta = pot.beta
    model = pot.model
    if beta == 0:
        return 0.0, 0.0
    if shortcut:
        if not model.is_radial or not is_radially_nonincreasing(model, 1000):
            raise ValueError("the shortcut bounds need radially nonincreasing couplings")
        m = abs(i) + 1
        return beta * m * abs(coupling(model, i, k)), beta * m * left_coupling_sum(model, i, k + 1)
    osc = beta * sum(abs(coupling(model, j, k)) for j in range(i, 1))
    var = beta * sum(left_coupling_sum(model, j, k + 1) for j in range(i, 1))
    return osc, var


def sensitivity_rows(src, i: int, lags, method=None) -> list[SensitivityRow]:
    """Rows for each k in ``lags`` in the given order."""
    return [sensitivity_row(src, i, k, method) for k in lags]
