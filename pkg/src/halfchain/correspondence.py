"""Finite-window LSS and specifications, and the maps between them.

Everything lives on a working window [ls, 0] over an alphabet of size q,
closed on the left by a fixed tail that is baked into the objects.  The
identities checked here are algebraic, so they hold exactly at any
truncation depth: both sides share the same truncated Hamiltonian.

Configurations are handled as integer code arrays (0..q-1).  For the Ising
alphabet code 0 is -1 and code 1 is +1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from halfchain.core import ISING, Alphabet, Window, WindowConfig, check_site, code_matrix
from halfchain.couplings import IsingPotential, coupling_matrix
from halfchain.kernels import (ExteriorSpec, IsingSystem, gibbs_kernel, log_weights,
                               resolve_context)


class ZeroDenominator(ArithmeticError):
    """A normalizing sum vanished; only possible for a null LSS."""


def _index(codes, q: int) -> int:
    idx = 0
    for c in codes:
        idx = idx * q + int(c)
    return idx


def _to_config(codes, l: int, alphabet: Alphabet) -> WindowConfig:
    return WindowConfig.on(l, [alphabet.decode(int(c)) for c in codes], alphabet)


@dataclass
class FiniteLSS:
    """Singleton kernels f_i for i in [ls, 0] under a fixed tail left of ls.

    ``tables[i - ls]`` has shape (q**(i - ls), q): the row is the past on
    [ls, i - 1] in lexicographic order.
    """

    ls: int
    alphabet: Alphabet
    tables: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        check_site(self.ls)
        q = len(self.alphabet)
        if len(self.tables) != 1 - self.ls:
            raise ValueError("one table per site of [ls, 0] is required")
        for a, T in enumerate(self.tables):
            if T.shape != (q**a, q):
                raise ValueError(f"table for site {self.ls + a} has shape {T.shape}")

    @property
    def q(self) -> int:
        return len(self.alphabet)

    @property
    def size(self) -> int:
        return 1 - self.ls

    def singleton(self, i: int, symbol_code: int, past_codes=()) -> float:
        """f_i(symbol | past on [ls, i - 1])."""
        a = i - self.ls
        if len(past_codes) != a:
            raise ValueError(f"f_{i} needs the past on [{self.ls}, {i - 1}]")
        return float(self.tables[a][_index(past_codes, self.q), symbol_code])

    def interval_table(self, l: int) -> np.ndarray:
        """f_{[l, 0]} as an array (q**(l - ls), q**(1 - l)): rows past, columns sigma_l^0."""
        q = self.q
        n_past = l - self.ls
        T = np.ones((q**n_past, 1))
        for i in range(l, 1):
            f = self.tables[i - self.ls]
            width = T.shape[1]
            rows = np.arange(q**n_past)[:, None] * width + np.arange(width)[None, :]
            T = (T[:, :, None] * f[rows]).reshape(q**n_past, width * q)
        return T

    def interval(self, m: int, n: int, sigma_codes, past_codes=()) -> float:
        """f_{[m, n]}(sigma | past) = prod_{i=m}^{n} f_i(sigma_i | sigma_m^{i-1} past)."""
        cur = list(past_codes)
        prob = 1.0
        for i, c in zip(range(m, n + 1), sigma_codes):
            prob *= self.singleton(i, int(c), cur)
            cur.append(int(c))
        return prob

    def min_prob(self) -> float:
        return float(min(T.min() for T in self.tables))

    def normalization_defect(self) -> float:
        return float(max(np.abs(T.sum(axis=1) - 1).max() for T in self.tables))

    @classmethod
    def from_potential(cls, pot: IsingPotential, ls: int, ext: ExteriorSpec) -> "FiniteLSS":
        system = IsingSystem(pot, ls, ext)
        return cls(ls, ISING, system.lss_tables(),
                   {"from": "potential", "beta": pot.beta, "model": pot.model,
                    "bc": str(ext.bc), "eps": system.eps})

    @classmethod
    def random(cls, ls: int, alphabet: Alphabet, rng: np.random.Generator,
               floor: float = 0.05) -> "FiniteLSS":
        """Random non-null LSS: floor + (1 - q floor) * Dirichlet(1) per conditional."""
        q = len(alphabet)
        if q * floor >= 1:
            raise ValueError("floor too large for the alphabet")
        tables = []
        for a in range(1 - ls):
            d = rng.dirichlet(np.ones(q), size=q**a)
            tables.append(floor + (1 - q * floor) * d)
        return cls(ls, alphabet, tables, {"from": "random", "floor": floor})


KernelFn = Callable[[tuple, np.ndarray], np.ndarray]


@dataclass
class FiniteSpecification:
    """Kernels gamma_Lambda on finite site sets Lambda inside [ls, 0].

    ``kernel(sites, omega)`` returns probabilities over the configurations of
    ``sites`` (lexicographic, shape (q**len(sites),)) given the full window
    configuration ``omega``; entries of omega on ``sites`` are ignored.
    """

    ls: int
    alphabet: Alphabet
    evaluator: KernelFn
    provenance: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return len(self.alphabet)

    @property
    def size(self) -> int:
        return 1 - self.ls

    def kernel(self, sites, omega) -> np.ndarray:
        sites = tuple(sorted(int(s) for s in sites))
        if not sites or sites[0] < self.ls or sites[-1] > 0:
            raise ValueError(f"sites {sites} are not inside [{self.ls}, 0]")
        return self.evaluator(sites, np.asarray(omega, dtype=np.int64))

    def prob(self, sites, sigma_codes, omega) -> float:
        return float(self.kernel(sites, omega)[_index(sigma_codes, self.q)])

    @classmethod
    def from_potential(cls, pot: IsingPotential, ls: int, ext: ExteriorSpec) -> "FiniteSpecification":
        """Gibbs kernels exp(-H_Lambda) built from the Hamiltonian of each Lambda.

        Intervals go through ``gibbs_kernel`` with past and inside exterior;
        other site sets use the Hamiltonian terms touching Lambda directly.
        """
        n = 1 - ls
        J = coupling_matrix(pot.model, np.arange(ls, 1))
        tail = resolve_context(pot, Window(ls, 0), ext).field

        def evaluator(sites, omega):
            spins = 2.0 * omega - 1.0
            lo, hi = sites[0], sites[-1]
            if hi - lo + 1 == len(sites):
                past = _to_config(omega[: lo - ls], ls, ISING) if lo > ls else None
                inside = _to_config(omega[hi - ls + 1 :], hi + 1, ISING) if hi < 0 else None
                return gibbs_kernel(pot, Window(lo, hi), ext, inside, past).probs
            idx = np.array([s - ls for s in sites])
            rest = np.setdiff1d(np.arange(n), idx)
            h = tail[idx] + J[np.ix_(idx, rest)] @ spins[rest]
            S = 2.0 * code_matrix(len(sites)) - 1.0
            Jll = J[np.ix_(idx, idx)]
            lw = pot.beta * (0.5 * np.einsum("ai,ij,aj->a", S, Jll, S) + S @ h)
            w = np.exp(lw - lw.max())
            return w / w.sum()

        return cls(ls, ISING, evaluator, {"from": "potential", "beta": pot.beta,
                                          "model": pot.model, "bc": str(ext.bc)})


def map_b(f: FiniteLSS) -> FiniteSpecification:
    """gamma^f_Lambda(sigma | omega) = f_{[l,0]}(sigma omega_rest | omega_<l) / same summed over sigma.

    Here l is the leftmost site of Lambda and omega_rest is omega on [l, 0]
    outside Lambda.  For Lambda = [l, 0] this is f_{[l, 0]} itself.
    """
    q, ls = f.q, f.ls
    cache = {}

    def interval(l):
        if l not in cache:
            cache[l] = f.interval_table(l)
        return cache[l]

    def evaluator(sites, omega):
        l = sites[0]
        row = interval(l)[_index(omega[: l - ls], q)]
        arr = row.reshape((q,) * (1 - l))
        sel = tuple(slice(None) if s in sites else int(omega[s - ls]) for s in range(l, 1))
        num = np.asarray(arr[sel], dtype=float).reshape(-1)
        den = num.sum()
        if not den > 0:
            raise ZeroDenominator(f"vanishing normalization on {sites}")
        return num / den

    return FiniteSpecification(ls, f.alphabet, evaluator, {"from": "lss", "lss": f.provenance})


def map_c(gamma: FiniteSpecification) -> FiniteLSS:
    """f^gamma_i(omega_i | past) = marginal at i of gamma_{[i, 0]}(. | past)."""
    q, ls = gamma.q, gamma.ls
    tables = []
    for i in range(ls, 1):
        a = i - ls
        sites = tuple(range(i, 1))
        T = np.empty((q**a, q))
        omega = np.zeros(1 - ls, dtype=np.int64)
        for r, past in enumerate(code_matrix(a, q)):
            omega[:a] = past
            k = gamma.kernel(sites, omega).reshape(q, -1)
            T[r] = k.sum(axis=1)
        tables.append(T)
    return FiniteLSS(ls, gamma.alphabet, tables, {"from": "specification",
                                                  "spec": gamma.provenance})


def check_specification_consistency(gamma: FiniteSpecification, lam, delta,
                                    omega=None) -> float:
    """max |sum_xi gamma_Delta(xi | omega) gamma_Lambda(sigma | xi omega) - gamma_Delta(sigma | omega)|.

    ``omega=None`` runs over every configuration of [ls, 0] outside Delta.
    """
    lam = tuple(sorted(lam))
    delta = tuple(sorted(delta))
    if not set(lam) <= set(delta):
        raise ValueError("Lambda must be inside Delta")
    q, ls = gamma.q, gamma.ls
    n = gamma.size
    d_idx = [s - ls for s in delta]
    outside = [a for a in range(n) if a not in d_idx]
    contexts = ([np.asarray(omega, dtype=np.int64)] if omega is not None
                else [_fill(n, outside, c) for c in code_matrix(len(outside), q)])
    lam_pos = [delta.index(s) for s in lam]
    worst = 0.0
    for ctx in contexts:
        gD = gamma.kernel(delta, ctx).reshape((q,) * len(delta))
        rhs = _marginal(gD, lam_pos)
        lhs = np.zeros(q ** len(lam))
        xi_all = code_matrix(len(delta), q)
        w = gD.reshape(-1)
        for idx, xi in enumerate(xi_all):
            full = ctx.copy()
            full[d_idx] = xi
            lhs += w[idx] * gamma.kernel(lam, full)
        worst = max(worst, float(np.abs(lhs - rhs.reshape(-1)).max()))
    return worst


def _fill(n, positions, codes):
    out = np.zeros(n, dtype=np.int64)
    out[positions] = codes
    return out


def _marginal(arr: np.ndarray, keep) -> np.ndarray:
    drop = tuple(a for a in range(arr.ndim) if a not in keep)
    return arr.sum(axis=drop) if drop else arr


def window_intervals(ls: int):
    return [(l, m) for l in range(ls, 1) for m in range(l, 1)]


def check_roundtrips(f: FiniteLSS | None = None, gamma: FiniteSpecification | None = None,
                     site_sets=None) -> tuple[float, float]:
    """(max |(c o b)(f) - f|, max |(b o c)(gamma) - gamma|); a missing input gives nan.

    The second defect runs over all intervals of the window (or ``site_sets``)
    and every configuration outside them.
    """
    d_cb = d_bc = float("nan")
    if f is not None:
        back = map_c(map_b(f))
        d_cb = float(max(np.abs(A - B).max() for A, B in zip(back.tables, f.tables)))
    if gamma is not None:
        bc = map_b(map_c(gamma))
        q, n = gamma.q, gamma.size
        sets = site_sets or [tuple(range(l, m + 1)) for l, m in window_intervals(gamma.ls)]
        d_bc = 0.0
        for sites in sets:
            pos = [s - gamma.ls for s in sites]
            outside = [a for a in range(n) if a not in pos]
            for c in code_matrix(len(outside), q):
                omega = _fill(n, outside, c)
                diff = np.abs(bc.kernel(sites, omega) - gamma.kernel(sites, omega)).max()
                d_bc = max(d_bc, float(diff))
    return d_cb, d_bc


@dataclass(frozen=True)
class Exterior:
    """A conditioning configuration for a window [l, m]: past, inside exterior and tail."""

    ext: ExteriorSpec
    past: WindowConfig | None = None
    inside: WindowConfig | None = None


def comparison_bound_check(pot: IsingPotential, window: Window, h, omega: Exterior,
                           sigma: Exterior, tol: float = 1e-12):
    """Compare |int h dgamma(.|omega) - int h dgamma(.|sigma)| with ||h|| sup |H_omega - H_sigma|.

    Returns (lhs, rhs, ok).
    """
    h = np.asarray(h, dtype=float)
    cw = resolve_context(pot, window, omega.ext, omega.past, omega.inside)
    cs = resolve_context(pot, window, sigma.ext, sigma.past, sigma.inside)
    lw_w = log_weights(pot, cw)
    lw_s = log_weights(pot, cs)
    pw = np.exp(lw_w - lw_w.max())
    pw /= pw.sum()
    ps = np.exp(lw_s - lw_s.max())
    ps /= ps.sum()
    lhs = abs(float(h @ pw) - float(h @ ps))
    # log weights are -H, so their difference is the Hamiltonian difference up to sign
    rhs = float(np.abs(h).max()) * float(np.abs(lw_w - lw_s).max())
    return lhs, rhs, bool(lhs <= rhs + tol)


def random_lss_pair(ls: int, q: int, seed: int):
    """A random non-null LSS over q symbols (Ising alphabet when q == 2)."""
    rng = np.random.default_rng(seed)
    alphabet = ISING if q == 2 else Alphabet.of_size(q)
    return FiniteLSS.random(ls, alphabet, rng)


def all_site_subsets(ls: int, max_size: int | None = None):
    sites = list(range(ls, 1))
    for r in range(1, (max_size or len(sites)) + 1):
        yield from itertools.combinations(sites, r)
