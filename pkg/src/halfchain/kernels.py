"""Exact Gibbs kernels, LSS singletons and interval kernels for Ising pair potentials.

Conditioning context.  A kernel on a window Lambda = [l, m] is closed by

* ``past``: a configuration on [a, l - 1] (possibly empty, then a = l);
* ``exterior_inside``: a configuration on [m + 1, 0] when m < 0;
* an ``ExteriorSpec``: boundary condition on the tail strictly left of a,
  with tail interactions summed over sites >= anchor - D (anchor defaults to a).

Weights are kept in the log domain and normalized with logsumexp.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from halfchain.core import (DEFAULT_CAP, ISING, BoundaryCondition, CapExceeded, Window,
                            WindowConfig, check_site, spin_matrix)
from halfchain.couplings import (IsingPotential, coupling_matrix, default_depth,
                                 exterior_field, truncation_error)


class MissingExterior(ValueError):
    """Exterior values needed by a Hamiltonian were not supplied."""


class NotBinary(ValueError):
    """An Ising routine received a non-binary alphabet."""


@dataclass(frozen=True)
class ExteriorSpec:
    """Boundary condition on the infinite tail and its truncation depth D.

    ``depth=None`` picks the smallest power of two with eps(D) <= 1e-8
    (capped; see ``couplings.default_depth``).
    """

    bc: BoundaryCondition = field(default_factory=BoundaryCondition.all_plus)
    depth: int | None = None
    anchor: int | None = None

    def __post_init__(self):
        if self.depth is not None and self.depth < 1:
            raise ValueError("truncation depth must be >= 1")

    def resolved_depth(self, pot: IsingPotential, size: int) -> int:
        if self.bc.is_free:
            return 1 if self.depth is None else self.depth
        if self.depth is not None:
            return self.depth
        return default_depth(pot.model, pot.beta, size, bc=self.bc)

    def with_bc(self, bc: BoundaryCondition) -> "ExteriorSpec":
        return ExteriorSpec(bc, self.depth, self.anchor)


def _values(cfg: WindowConfig | None) -> np.ndarray:
    if cfg is None or cfg.window is None:
        return np.zeros(0)
    if cfg.alphabet != ISING:
        raise NotBinary("Ising kernels need the alphabet (-1, +1)")
    return np.asarray(cfg.values, dtype=float)


@dataclass(frozen=True)
class Context:
    """Resolved conditioning for a window: fields acting on the window sites."""

    window: Window
    field: np.ndarray
    depth: int
    eps: float
    attach: int


def resolve_context(pot: IsingPotential, window: Window, ext: ExteriorSpec,
                    past: WindowConfig | None = None,
                    exterior_inside: WindowConfig | None = None) -> Context:
    """Field h_j on window sites from past, inside exterior and the truncated tail."""
    l, m = window.l, window.m
    n = window.size
    h = np.zeros(n)
    model = pot.model
    attach = l
    if past is not None and past.window is not None:
        if past.window.m != l - 1:
            raise ValueError(f"past {past.window} must end at {l - 1}")
        attach = past.window.l
        pv = _values(past)
        J = coupling_matrix(model, np.arange(attach, m + 1))
        h += J[len(pv):, : len(pv)] @ pv
    if m < 0:
        if exterior_inside is None or exterior_inside.window is None:
            if not ext.bc.is_free:
                raise MissingExterior(f"window {window} needs values on [{m + 1}, 0]")
        else:
            if exterior_inside.window.l != m + 1 or exterior_inside.window.m != 0:
                raise ValueError(f"exterior_inside must cover [{m + 1}, 0]")
            ev = _values(exterior_inside)
            J = coupling_matrix(model, np.arange(l, 1))
            h += J[:n, n:] @ ev
    # the default depth depends only on [attach, 0], so sub-windows share it
    D = ext.resolved_depth(pot, 1 - attach)
    eps = 0.0
    if not ext.bc.is_free:
        anchor = attach if ext.anchor is None else ext.anchor
        horizon = anchor - D
        tail = exterior_field(model, attach, ext.bc, horizon)
        h += tail[l - attach : l - attach + n]
        # omitted tail sites lie more than l - horizon away from every window site
        eps = truncation_error(model, pot.beta, n, l - horizon, ext.bc)
    return Context(window, h, D, eps, attach)


def log_weights(pot: IsingPotential, ctx: Context) -> np.ndarray:
    """-H for every configuration of the window, in lexicographic order."""
    n = ctx.window.size
    J = coupling_matrix(pot.model, np.asarray(ctx.window.sites))
    beta = pot.beta
    if beta == 0:
        return np.zeros(2**n)
    split = n // 2
    n_hi, n_lo = split, n - split
    S_hi = spin_matrix(n_hi).astype(float)
    S_lo = spin_matrix(n_lo).astype(float)
    h = ctx.field
    J_hh, J_ll, J_hl = J[:n_hi, :n_hi], J[n_hi:, n_hi:], J[:n_hi, n_hi:]
    e_hi = 0.5 * np.einsum("ai,ij,aj->a", S_hi, J_hh, S_hi) + S_hi @ h[:n_hi]
    e_lo = 0.5 * np.einsum("ai,ij,aj->a", S_lo, J_ll, S_lo) + S_lo @ h[n_hi:]
    cross = S_hi @ J_hl @ S_lo.T
    return (beta * (e_hi[:, None] + e_lo[None, :] + cross)).reshape(-1)


def hamiltonian(pot: IsingPotential, window: Window, sigma: WindowConfig, ext: ExteriorSpec,
                exterior_inside: WindowConfig | None = None,
                past: WindowConfig | None = None) -> tuple[float, float]:
    """H_Lambda(sigma | exterior) and the truncation error eps(D)."""
    if sigma.window != window:
        raise ValueError(f"sigma lives on {sigma.window}, not {window}")
    ctx = resolve_context(pot, window, ext, past, exterior_inside)
    s = _values(sigma)
    J = coupling_matrix(pot.model, np.asarray(window.sites))
    H = -pot.beta * (0.5 * s @ J @ s + ctx.field @ s)
    return float(H), ctx.eps


@dataclass
class KernelTable:
    """Probability table of a kernel on ``window`` over all configurations (lexicographic)."""

    window: Window
    log_weights: np.ndarray
    probs: np.ndarray
    logZ: float
    eps: float = 0.0
    depth: int = 0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_log_weights(cls, window, lw, eps=0.0, depth=0, meta=None):
        logZ = float(logsumexp(lw))
        probs = np.exp(lw - logZ)
        return cls(window, lw, probs, logZ, eps, depth, dict(meta or {}))

    def __len__(self):
        return len(self.probs)

    def prob(self, sigma: WindowConfig) -> float:
        if sigma.window != self.window:
            raise ValueError(f"sigma lives on {sigma.window}, not {self.window}")
        return float(self.probs[sigma.index()])

    def configs(self):
        for idx in range(len(self.probs)):
            yield WindowConfig.from_index(idx, self.window)

    def spins(self) -> np.ndarray:
        return spin_matrix(self.window.size)

    def marginal(self, sites) -> np.ndarray:
        """Marginal over ``sites`` (sorted), as an array of shape (2,) * len(sites)."""
        n = self.window.size
        P = self.probs.reshape((2,) * n)
        keep = [s - self.window.l for s in sites]
        drop = tuple(a for a in range(n) if a not in keep)
        return P.sum(axis=drop) if drop else P

    def to_csv(self, path, beta=None, model=None):
        with open(path, "w", newline="") as fh:
            fh.write(f"# window={self.window} beta={beta!r} model={model} "
                     f"D={self.depth} epsD={self.eps!r}\n")
            w = csv.writer(fh)
            w.writerow(["config", "logweight", "prob"])
            for idx, cfg in enumerate(self.configs()):
                w.writerow([cfg.to_string(), f"{self.log_weights[idx]:.17g}",
                            f"{self.probs[idx]:.17g}"])


def _check_cap(n: int, cap: int):
    if n > cap:
        raise CapExceeded(f"window of {n} sites exceeds the cap of {cap}")


def gibbs_kernel(pot: IsingPotential, window: Window, ext: ExteriorSpec,
                 exterior_inside: WindowConfig | None = None,
                 past: WindowConfig | None = None, cap: int = DEFAULT_CAP) -> KernelTable:
    """gamma_Lambda(. | exterior) over all configurations of ``window``."""
    _check_cap(window.size, cap)
    ctx = resolve_context(pot, window, ext, past, exterior_inside)
    lw = log_weights(pot, ctx)
    return KernelTable.from_log_weights(window, lw, ctx.eps, ctx.depth,
                                        {"bc": str(ext.bc), "beta": pot.beta})


def kernel_expectation(table: KernelTable, h) -> float:
    """sum_sigma h(sigma) probs(sigma); ``h`` is a callable on WindowConfig or an array."""
    if callable(h):
        vals = np.array([h(cfg) for cfg in table.configs()], dtype=float)
    else:
        vals = np.asarray(h, dtype=float)
    return float(vals @ table.probs)


def _site_past(i: int, past: WindowConfig | None) -> WindowConfig | None:
    if past is None or past.window is None:
        return None
    if past.window.m != i - 1:
        raise ValueError(f"past {past.window} must end at {i - 1}")
    return past


def lss_singleton(pot: IsingPotential, i: int, omega_i: int, past: WindowConfig | None,
                  ext: ExteriorSpec, cap: int = DEFAULT_CAP) -> float:
    """f_i(omega_i | past): the marginal at i of the Gibbs kernel on [i, 0].

    Numerator and denominator are the partition sums over [i + 1, 0] with
    omega_i fixed and over [i, 0], both in the log domain.
    """
    i = check_site(i)
    _check_cap(1 - i, cap)
    ctx = resolve_context(pot, Window(i, 0), ext, _site_past(i, past))
    lw = log_weights(pot, ctx).reshape(2, -1)
    num = logsumexp(lw[1 if omega_i == 1 else 0])
    den = logsumexp(lw)
    return float(math.exp(num - den))


def interval_kernel(pot: IsingPotential, m: int, n: int, sigma: WindowConfig,
                    past: WindowConfig | None, ext: ExteriorSpec,
                    cap: int = DEFAULT_CAP) -> float:
    """f_{[m, n]}(sigma | past) = prod_{i=m}^{n} f_i(sigma_i | sigma_m^{i-1} past)."""
    check_site(m), check_site(n)
    if m > n:
        raise ValueError("interval kernel needs m <= n")
    _check_cap(1 - m, cap)
    if sigma.window != Window(m, n):
        raise ValueError(f"sigma must live on [{m}, {n}]")
    from halfchain.core import concat

    cur = past if past is not None else WindowConfig.empty()
    if cur.window is not None and cur.window.m != m - 1:
        raise ValueError(f"past {cur.window} must end at {m - 1}")
    prob = 1.0
    for i in range(m, n + 1):
        prob *= lss_singleton(pot, i, sigma[i], cur, ext, cap)
        cur = concat(cur, WindowConfig.on(i, (sigma[i],)))
    return prob


class IsingSystem:
    """The joint Gibbs weights on [left, 0] under a fixed tail, with derived LSS tables.

    ``lss_tables()[i - left]`` has shape (2**(i - left), 2): row = past on
    [left, i - 1] in lexicographic order, column 0 for -1 and 1 for +1.
    """

    def __init__(self, pot: IsingPotential, left: int, ext: ExteriorSpec,
                 cap: int = DEFAULT_CAP):
        self.pot = pot
        self.left = check_site(left)
        self.ext = ext
        self.window = Window(left, 0)
        _check_cap(self.window.size, cap)
        self.ctx = resolve_context(pot, self.window, ext)
        self.log_weights = log_weights(pot, self.ctx)

    @property
    def eps(self):
        return self.ctx.eps

    @property
    def depth(self):
        return self.ctx.depth

    def table(self) -> KernelTable:
        return KernelTable.from_log_weights(self.window, self.log_weights, self.eps, self.depth)

    def lss_tables(self) -> list[np.ndarray]:
        n = self.window.size
        L = self.log_weights.reshape((2,) * n)
        partial = [None] * n
        cur = L
        for a in range(n - 1, -1, -1):
            partial[a] = cur
            cur = np.logaddexp(cur[..., 0], cur[..., 1]) if a > 0 else None
        out = []
        for a in range(n):
            # partial[a] has shape (2,) * (a + 1): log-sum over sites right of left + a
            P = partial[a].reshape(-1, 2)
            norm = np.logaddexp(P[:, 0], P[:, 1])
            out.append(np.exp(P - norm[:, None]))
        return out

    def magnetization(self, site: int = 0) -> float:
        t = self.table()
        s = spin_matrix(self.window.size)[:, site - self.left]
        return float(s @ t.probs)
