"""Coupling families J(i, j), pair potentials and certified tail bounds.

Three families cover the models of interest:

* ``PowerLaw(p)``: J(i, j) = |i - j|**-p.
* ``PowerLog(s, t)``: J(i, j) = r**-s * log(r + 1)**-t with r = |i - j|; the
  borderline family used for the Kac-Thompson comparison.
* ``Hierarchical``: Dyson's block couplings, J(i, j) = sum_{q >= p(i, j)} b_q 2**(1 - 2q)
  where p(i, j) is the smallest dyadic block level shared by i and j.
* ``Table``: an explicit finite list of couplings.

Hierarchical blocks are anchored with u(i) = 1 - i, so block boundaries fall
after sites 0, -1, -3, -7, ...  Equivalently p(i, j) is the bit length of
``(-i) XOR (-j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import special

from halfchain.core import BoundaryCondition, check_site, tail_codes

MAX_LEVEL = 63


class DiagonalQuery(ValueError):
    """J(i, i) was requested."""


class NoDecayMeta(ValueError):
    """An infinite-range model without asymptotic decay information."""


class NotSummable(ValueError):
    """The couplings are not absolutely summable, so the potential is not well defined."""


@dataclass(frozen=True)
class DecayMeta:
    """Asymptotic descriptor J(r) ~ C r**-s (log r)**-t.

    ``exact`` is False when C is only an upper constant (J(r) <= C r**-s ...),
    as for the hierarchical step profile.
    """

    C: float
    s: float
    t: float = 0.0
    exact: bool = True


@dataclass(frozen=True)
class PowerLaw:
    p: float

    @property
    def is_radial(self):
        return True

    @property
    def ferromagnetic(self):
        return True

    @property
    def finite_range(self):
        return None

    @property
    def decay_meta(self):
        return DecayMeta(1.0, self.p, 0.0, True)

    def summable(self) -> bool:
        return self.p > 1

    def profile(self, r):
        return np.asarray(r, dtype=float) ** -self.p

    def tail_bound(self, d: int) -> float:
        """Upper bound on sum_{r > d} J(r) by the integral test."""
        if self.p <= 1:
            return math.inf
        return d ** (1.0 - self.p) / (self.p - 1.0)

    def tail_sum(self, d):
        """sum_{r >= d} J(r), exactly (Hurwitz zeta)."""
        return special.zeta(self.p, np.asarray(d, dtype=float))

    def label(self):
        return f"power_law(p={self.p:g})"


@dataclass(frozen=True)
class PowerLog:
    s: float
    t: float = 0.0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("PowerLog needs t >= 0")

    @property
    def is_radial(self):
        return True

    @property
    def ferromagnetic(self):
        return True

    @property
    def finite_range(self):
        return None

    @property
    def decay_meta(self):
        return DecayMeta(1.0, self.s, self.t, True)

    def summable(self) -> bool:
        return self.s > 1 or (self.s == 1 and self.t > 1)

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return r**-self.s * np.log(r + 1.0) ** -self.t

    def tail_bound(self, d: int) -> float:
        if not self.summable():
            return math.inf
        if self.s > 1:
            return math.log(d + 2.0) ** -self.t * d ** (1.0 - self.s) / (self.s - 1.0)
        # s == 1, t > 1: r**-1 log(r+1)**-t <= r**-1 log(r)**-t, decreasing for r >= 2
        head = 0.0
        while d < 2:
            d += 1
            head += float(self.profile(d))
        return head + math.log(d) ** (1.0 - self.t) / (self.t - 1.0)

    def tail_sum(self, d):
        return _numeric_tail_sum(self, d)

    def label(self):
        return f"power_log(s={self.s:g},t={self.t:g})"


@dataclass(frozen=True)
class Hierarchical:
    """Dyson hierarchical couplings.

    ``alpha`` alone gives the parametric family b_q = 2**((2 - alpha) q).
    ``b`` gives an explicit prefix b_1..b_K; beyond it b_q follows the
    parametric family when ``alpha`` is set, and vanishes otherwise.
    """

    alpha: float | None = None
    b: tuple | None = None
    _levels: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.alpha is None and self.b is None:
            raise ValueError("Hierarchical needs alpha or an explicit b prefix")
        if self.b is not None:
            object.__setattr__(self, "b", tuple(float(x) for x in self.b))
            if any(x < 0 for x in self.b):
                raise ValueError("hierarchical b_q must be nonnegative")
        if self.alpha is not None and self.alpha <= 0:
            raise NotSummable(f"hierarchical alpha={self.alpha} <= 0 gives infinite couplings")
        object.__setattr__(self, "_levels", tuple(self._level_values()))

    @property
    def K(self) -> int:
        return 0 if self.b is None else len(self.b)

    def b_q(self, q: int) -> float:
        if q <= self.K:
            return self.b[q - 1]
        if self.alpha is None:
            return 0.0
        return 2.0 ** ((2.0 - self.alpha) * q)

    def _param_tail(self, q: int) -> float:
        # sum_{q' >= q} 2**((2 - a) q') 2**(1 - 2 q') = 2 * 2**(-a q) / (1 - 2**-a)
        if self.alpha is None:
            return 0.0
        return 2.0 * 2.0 ** (-self.alpha * q) / (1.0 - 2.0 ** (-self.alpha))

    def _level_values(self):
        top = max(MAX_LEVEL, self.K) + 1
        vals = [0.0] * (top + 1)
        for q in range(top, 0, -1):
            if q > self.K:
                vals[q] = self._param_tail(q)
            else:
                vals[q] = self.b[q - 1] * 2.0 ** (1 - 2 * q) + vals[q + 1]
        return vals

    def level_coupling(self, q: int) -> float:
        """Coupling between two sites whose smallest common block has level ``q``."""
        if q >= len(self._levels):
            return self._param_tail(q)
        return self._levels[q]

    @property
    def is_radial(self):
        return False

    @property
    def ferromagnetic(self):
        return True

    @property
    def finite_range(self):
        if self.alpha is None:
            last = max((q for q in range(1, self.K + 1) if self.b[q - 1] > 0), default=0)
            return 2**last - 1
        return None

    @property
    def decay_meta(self):
        if self.alpha is None:
            return None
        # J(r) = J_level(bitlen r) with 2**bitlen(r) > r, so J(r) <= C r**-alpha
        C = 2.0 / (1.0 - 2.0 ** (-self.alpha))
        for q in range(1, self.K + 2):
            C = max(C, self.level_coupling(q) * 2.0 ** (self.alpha * q))
        return DecayMeta(C, self.alpha, 0.0, False)

    def summable(self) -> bool:
        return self.alpha is None or self.alpha > 1

    def profile(self, r):
        r = np.asarray(r, dtype=np.int64)
        lev = _bit_length(r)
        table = np.array(self._levels)
        return table[np.minimum(lev, MAX_LEVEL + 1)]

    def tail_bound(self, d: int) -> float:
        """Exact sum_{r > d} J(r) of the radial profile (closed form per level)."""
        if not self.summable():
            return math.inf
        q0 = int(d + 1).bit_length()
        total = (2**q0 - 1 - d) * self.level_coupling(q0)
        Q = max(self.K + 1, q0 + 1)
        for q in range(q0 + 1, Q):
            total += 2.0 ** (q - 1) * self.level_coupling(q)
        if self.alpha is not None:
            x = 2.0 ** (1.0 - self.alpha)
            Ka = 2.0 / (1.0 - 2.0 ** (-self.alpha))
            total += 0.5 * Ka * x**Q / (1.0 - x)
        return total

    def tail_sum(self, d):
        d = np.atleast_1d(np.asarray(d, dtype=np.int64))
        out = np.array([self.tail_bound(int(x) - 1) for x in d])
        return out

    def label(self):
        if self.b is None:
            return f"hierarchical(alpha={self.alpha:g})"
        tail = "" if self.alpha is None else f",alpha={self.alpha:g}"
        return f"hierarchical(b={list(self.b)}{tail})"


@dataclass(frozen=True)
class Table:
    """Finite explicit couplings; ``entries`` holds (i, j, J) with i != j."""

    entries: tuple = ()
    _map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        norm = {}
        for i, j, J in self.entries:
            i, j = check_site(i), check_site(j)
            if i == j:
                raise DiagonalQuery("a table entry on the diagonal")
            norm[(min(i, j), max(i, j))] = float(J)
        object.__setattr__(self, "entries", tuple((a, b, J) for (a, b), J in sorted(norm.items())))
        object.__setattr__(self, "_map", norm)

    def get(self, i: int, j: int) -> float:
        return self._map.get((min(i, j), max(i, j)), 0.0)

    @property
    def is_radial(self):
        return False

    @property
    def ferromagnetic(self):
        return all(J >= 0 for _, _, J in self.entries)

    @property
    def finite_range(self):
        return max((b - a for a, b, J in self.entries if J != 0), default=0)

    @property
    def decay_meta(self):
        return None

    def summable(self) -> bool:
        return True

    def profile(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=np.int64))
        best = {}
        for a, b, J in self.entries:
            best[b - a] = max(best.get(b - a, 0.0), abs(J))
        return np.array([best.get(int(x), 0.0) for x in r])

    def tail_bound(self, d: int) -> float:
        best = {}
        for a, b, J in self.entries:
            if b - a > d:
                best[b - a] = max(best.get(b - a, 0.0), abs(J))
        return float(sum(best.values()))

    def tail_sum(self, d):
        return np.array([self.tail_bound(int(x) - 1) for x in np.atleast_1d(d)])

    def label(self):
        return f"table({len(self.entries)} entries)"


CouplingModel = Union[PowerLaw, PowerLog, Hierarchical, Table]


@dataclass(frozen=True)
class IsingPotential:
    """phi_{i,j}(w) = -beta J(i, j) w_i w_j; all other phi_A vanish."""

    model: CouplingModel
    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    def phi(self, i: int, j: int, wi: int, wj: int) -> float:
        return -self.beta * coupling(self.model, i, j) * wi * wj


def _bit_length(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64).copy()
    out = np.zeros(x.shape, dtype=np.int64)
    while np.any(x > 0):
        nz = x > 0
        out[nz] += 1
        x >>= 1
    return out


def block_level(i: int, j: int) -> int:
    """Smallest p >= 1 with i and j in the same 2**p block."""
    i, j = check_site(i), check_site(j)
    if i == j:
        raise DiagonalQuery(f"block level of ({i}, {i})")
    return ((-i) ^ (-j)).bit_length()


def coupling(model: CouplingModel, i: int, j: int) -> float:
    i, j = check_site(i), check_site(j)
    if i == j:
        raise DiagonalQuery(f"J({i}, {i}) is undefined")
    if isinstance(model, Table):
        return model.get(i, j)
    if isinstance(model, Hierarchical):
        return model.level_coupling(block_level(i, j))
    return float(model.profile(abs(i - j)))


def radial_profile(model: CouplingModel, r: int) -> float:
    """sup{|J(i, j)| : |i - j| = r}."""
    if r < 1:
        raise ValueError("radial profile needs r >= 1")
    return float(np.atleast_1d(model.profile(r))[0])


def interaction_tail_bound(model: CouplingModel, i: int, depth: int) -> float:
    """Upper bound on sum_{j <= 0, |i - j| > depth} |J(i, j)|."""
    i = check_site(i)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(model, Table):
        return float(sum(abs(J) for a, b, J in model.entries
                         if i in (a, b) and b - a > depth))
    if model.decay_meta is None and model.finite_range is None:
        raise NoDecayMeta(f"{model.label()} has no decay information")
    left = model.tail_bound(depth)
    right = 0.0
    if -i > depth:
        right = float(np.sum(np.abs(model.profile(np.arange(depth + 1, -i + 1)))))
    return left + right


def coupling_matrix(model: CouplingModel, sites) -> np.ndarray:
    """Symmetric matrix J(sites[a], sites[b]) with zero diagonal."""
    sites = np.asarray(sites, dtype=np.int64)
    n = len(sites)
    if isinstance(model, Table):
        M = np.zeros((n, n))
        pos = {int(s): a for a, s in enumerate(sites)}
        for a, b, J in model.entries:
            if a in pos and b in pos:
                M[pos[a], pos[b]] = M[pos[b], pos[a]] = J
        return M
    if isinstance(model, Hierarchical):
        x = -sites
        lev = _bit_length(x[:, None] ^ x[None, :])
        table = np.array(model._levels)
        M = table[np.minimum(lev, MAX_LEVEL + 1)]
    else:
        d = np.abs(sites[:, None] - sites[None, :])
        with np.errstate(divide="ignore"):
            M = model.profile(np.maximum(d, 1))
    M = np.array(M, dtype=float)
    np.fill_diagonal(M, 0.0)
    return M


def _tail_value_sum(bc: BoundaryCondition, attach: int, s1: int, s2: int) -> float:
    """Sum of +-1 tail values over sites s1..s2 (s2 < attach)."""
    if s2 < s1:
        return 0.0
    count = s2 - s1 + 1
    if bc.kind == "all_plus":
        return float(count)
    if bc.kind == "all_minus":
        return -float(count)
    pat = np.asarray(bc.pattern, dtype=float)
    P = len(pat)
    cum = np.concatenate([[0.0], np.cumsum(pat)])

    def upto(m):  # sum of values at offsets 0..m-1 where offset o <-> site attach - 1 - o
        full, rem = divmod(m, P)
        # offset o has pattern index (-1 - o) % P; walk the pattern backwards
        rev = np.concatenate([[0.0], np.cumsum(pat[::-1])])
        return full * cum[-1] + rev[rem]

    o_lo, o_hi = attach - 1 - s2, attach - 1 - s1
    return float(upto(o_hi + 1) - upto(o_lo))


@lru_cache(maxsize=256)
def exterior_field(model: CouplingModel, left: int, bc: BoundaryCondition,
                   horizon: int) -> np.ndarray:
    """Field sum_{k=horizon}^{left-1} J(j, k) w_k on every site j of [left, 0].

    The tail values w_k come from ``bc`` attached at ``left``; sites below
    ``horizon`` are omitted.  A free boundary gives zero field.
    """
    n = 1 - left
    if bc.is_free or horizon >= left:
        return np.zeros(n)
    sites = np.arange(left, 1)
    out = np.zeros(n)
    if isinstance(model, Table):
        for a, b, J in model.entries:
            for w, k in ((a, b), (b, a)):
                if left <= w <= 0 and horizon <= k < left:
                    out[w - left] += J * (2 * tail_codes(bc, k, k, left)[0] - 1)
        return out
    if isinstance(model, Hierarchical):
        xt_lo, xt_hi = -left + 1, -horizon
        top = int(-horizon).bit_length() + 1
        for a, j in enumerate(sites):
            x = -int(j)
            for q in range(1, top + 1):
                half = 1 << (q - 1)
                base = (x >> q) << q
                sib = base + (half if not (x >> (q - 1)) & 1 else 0)
                lo, hi = max(sib, xt_lo), min(sib + half - 1, xt_hi)
                if lo <= hi:
                    out[a] += model.level_coupling(q) * _tail_value_sum(bc, left, -hi, -lo)
        return out
    D = left - horizon
    if isinstance(model, PowerLaw) and bc.kind in ("all_plus", "all_minus"):
        c = 1.0 if bc.kind == "all_plus" else -1.0
        r0 = (sites - left + 1).astype(float)
        return c * (special.zeta(model.p, r0) - special.zeta(model.p, r0 + D))
    R = n + D + 1
    prof = np.zeros(R + 1)
    prof[1:] = model.profile(np.arange(1, R + 1))
    if bc.kind in ("all_plus", "all_minus"):
        c = 1.0 if bc.kind == "all_plus" else -1.0
        # suffix sums accumulated from the small end for accuracy
        suf = np.concatenate([np.cumsum(prof[::-1])[::-1], [0.0]])
        for a, j in enumerate(sites):
            r0 = j - left + 1
            out[a] = c * (suf[r0] - suf[r0 + D])
        return out
    pat = np.asarray(bc.pattern, dtype=float)
    P = len(pat)
    for a, j in enumerate(sites):
        r0 = j - left + 1
        seg = prof[r0 : r0 + D]
        for rho in range(min(P, D)):
            out[a] += pat[(-1 - rho) % P] * seg[rho::P].sum()
    return out


def truncation_error(model: CouplingModel, beta: float, size: int, depth: int,
                     bc: BoundaryCondition | None = None) -> float:
    """eps(D) = beta * size * (tail bound at depth D); zero for a free boundary."""
    if bc is not None and bc.is_free:
        return 0.0
    if beta == 0:
        return 0.0
    return beta * size * model.tail_bound(depth)


MAX_DEPTH = 2**22
MAX_DEPTH_CLOSED_FORM = 2**512


def max_depth_for(model: CouplingModel, bc: BoundaryCondition | None = None) -> int:
    """Largest default depth: huge where the tail field has a closed form, else 2**22."""
    if isinstance(model, Hierarchical):
        return MAX_DEPTH_CLOSED_FORM
    if isinstance(model, PowerLaw) and (bc is None or bc.kind in ("all_plus", "all_minus")):
        return MAX_DEPTH_CLOSED_FORM
    return MAX_DEPTH


def default_depth(model: CouplingModel, beta: float, size: int, target: float = 1e-8,
                  max_depth: int | None = None, bc: BoundaryCondition | None = None) -> int:
    """Smallest power of two D with eps(D) <= target, capped at ``max_depth``."""
    fr = model.finite_range
    if fr is not None:
        return max(1, fr)
    if max_depth is None:
        max_depth = max_depth_for(model, bc)
    D = 64
    while D < max_depth and truncation_error(model, beta, size, D) > target:
        D *= 2
    return min(D, max_depth)


def _numeric_tail_sum(model, d, rmax: int = 400_000):
    """sum_{r >= d} J(r) from an explicit partial sum plus the certified remainder."""
    d = np.atleast_1d(np.asarray(d, dtype=np.int64))
    top = max(int(d.max()), 1) + rmax
    prof = model.profile(np.arange(1, top + 1))
    suf = np.cumsum(prof[::-1])[::-1]
    rem = model.tail_bound(top)
    return suf[np.maximum(d, 1) - 1] + rem


def tail_sums(model: CouplingModel, dmax: int) -> np.ndarray:
    """Array T with T[d] = sum_{r >= d} J(r) for d = 1..dmax (T[0] unused)."""
    d = np.arange(1, dmax + 1)
    out = np.zeros(dmax + 1)
    out[1:] = model.tail_sum(d)
    out[0] = np.nan
    return out


def is_radially_nonincreasing(model: CouplingModel, rmax: int = 10_000) -> bool:
    prof = model.profile(np.arange(1, rmax + 1))
    return bool(np.all(np.diff(prof) <= 0))
