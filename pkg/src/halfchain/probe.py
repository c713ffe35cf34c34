"""Finite-volume magnetization at site 0 under opposing boundary conditions.

Two routes: exact enumeration of the Gibbs kernel on [-n+1, 0], and
single-site heat-bath Monte Carlo with the same truncated exterior field.
Boundary gaps are reported as finite-size trends only.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from halfchain.core import DEFAULT_CAP, BoundaryCondition, CapExceeded, Window
from halfchain.couplings import (CouplingModel, Hierarchical, IsingPotential, PowerLaw,
                                 coupling_matrix)
from halfchain.kernels import ExteriorSpec, IsingSystem, resolve_context

MAX_MCMC_SITES = 4096
CUTOFF = 1e-12
CHUNK_SWEEPS = 4096


@dataclass(frozen=True)
class MCMCParams:
    sweeps: int = 100_000
    burn_in: int = 1_000
    replicas: int = 8
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.sweeps < 1 or self.burn_in < 0 or self.replicas < 1:
            raise ValueError("sweeps >= 1, burn_in >= 0 and replicas >= 1 are required")
        if self.sweeps < 10 * self.burn_in:
            warnings.warn("sweeps < 10 * burn_in: the burn-in is a large share of the run")


@dataclass
class GapEstimate:
    n: int
    beta: float
    m_plus: float
    m_minus: float
    stderr: float = math.nan
    ess: float = math.nan
    depth: int = 0
    eps: float = 0.0
    mode: str = "exact"

    @property
    def gap(self) -> float:
        return self.m_plus - self.m_minus


@dataclass(frozen=True)
class MagnetizationEstimate:
    mean: float
    stderr: float
    ess: float
    replica_means: tuple
    depth: int
    eps: float


def exact_magnetization(pot: IsingPotential, n: int, bc: BoundaryCondition,
                        depth: int | None = None, cap: int = DEFAULT_CAP) -> float:
    """<sigma_0> under the Gibbs kernel on [-n+1, 0]."""
    system = IsingSystem(pot, -n + 1, ExteriorSpec(bc, depth), cap)
    return system.magnetization(0)


def exact_system(pot, n, bc, depth=None, cap=DEFAULT_CAP) -> IsingSystem:
    return IsingSystem(pot, -n + 1, ExteriorSpec(bc, depth), cap)


@numba.njit(nogil=True, cache=True)
def _heat_bath(spins, field, J, nbr_idx, nbr_ptr, two_beta, uniforms, record):
    """Run len(uniforms) sweeps in place; record[s] = spin at site 0 after sweep s.

    Sites are visited from site 0 (last array entry) leftward.  ``field`` is
    kept equal to J @ spins + exterior field.
    """
    n = spins.shape[0]
    for s in range(uniforms.shape[0]):
        for step in range(n):
            a = n - 1 - step
            p_plus = 1.0 / (1.0 + math.exp(-two_beta * field[a]))
            new = 1 if uniforms[s, step] < p_plus else -1
            if new != spins[a]:
                delta = new - spins[a]
                spins[a] = new
                for t in range(nbr_ptr[a], nbr_ptr[a + 1]):
                    b = nbr_idx[t]
                    field[b] += J[b, a] * delta
        record[s] = spins[n - 1]


def _neighbor_lists(J: np.ndarray):
    idx, ptr = [], [0]
    for a in range(J.shape[0]):
        nb = np.nonzero(np.abs(J[:, a]) >= CUTOFF)[0]
        idx.extend(nb.tolist())
        ptr.append(len(idx))
    return np.array(idx, dtype=np.int64), np.array(ptr, dtype=np.int64)


def _initial_spin(bc: BoundaryCondition) -> int:
    return -1 if bc.kind == "all_minus" else 1


def _run_replica(seed, replica, n, J, h_ext, nbr_idx, nbr_ptr, beta, init, params):
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, replica], dtype=np.uint64)))
    spins = np.full(n, init, dtype=np.int64)
    field = J @ spins + h_ext
    total = params.burn_in + params.sweeps
    rec_all = np.empty(params.sweeps, dtype=np.int64)
    done = 0
    while done < total:
        chunk = min(CHUNK_SWEEPS, total - done)
        u = rng.random((chunk, n))
        rec = np.empty(chunk, dtype=np.int64)
        _heat_bath(spins, field, J, nbr_idx, nbr_ptr, 2.0 * beta, u, rec)
        lo = max(done, params.burn_in)
        if lo < done + chunk:
            rec_all[lo - params.burn_in : done + chunk - params.burn_in] = rec[lo - done :]
        done += chunk
    return rec_all


def mcmc_magnetization(pot: IsingPotential, n: int, bc: BoundaryCondition, depth: int | None = None,
                       params: MCMCParams = MCMCParams()) -> MagnetizationEstimate:
    """Heat-bath estimate of <sigma_0> on [-n+1, 0] with replica standard error."""
    if not 1 <= n <= MAX_MCMC_SITES:
        raise ValueError(f"n must be in [1, {MAX_MCMC_SITES}]")
    window = Window(-n + 1, 0)
    ctx = resolve_context(pot, window, ExteriorSpec(bc, depth))
    J = coupling_matrix(pot.model, np.arange(-n + 1, 1))
    nbr_idx, nbr_ptr = _neighbor_lists(J)
    init = _initial_spin(bc)
    args = (n, J, ctx.field, nbr_idx, nbr_ptr, pot.beta, init, params)
    seed = int(params.seed)
    if params.threads > 1 and params.replicas > 1:
        with ThreadPoolExecutor(params.threads) as pool:
            recs = list(pool.map(lambda r: _run_replica(seed, r, *args), range(params.replicas)))
    else:
        recs = [_run_replica(seed, r, *args) for r in range(params.replicas)]
    means = np.array([r.mean() for r in recs])
    mean = float(means.mean())
    R = len(means)
    if R >= 2:
        stderr = float(means.std(ddof=1) / math.sqrt(R))
    else:
        batches = np.array_split(recs[0].astype(float), 20)
        bm = np.array([b.mean() for b in batches])
        stderr = float(bm.std(ddof=1) / math.sqrt(len(bm)))
    sample_var = float(np.mean([r.astype(float).var() for r in recs]))
    ess = sample_var / stderr**2 if stderr > 0 else math.inf
    return MagnetizationEstimate(mean, stderr, ess, tuple(means.tolist()), ctx.depth, ctx.eps)


@dataclass
class ProbeConfig:
    model: CouplingModel
    betas: tuple
    volumes: tuple
    depth: int | None = None
    mode: str = "exact"
    mcmc: MCMCParams = field(default_factory=MCMCParams)
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.mode not in ("exact", "mcmc"):
            raise ValueError("mode is 'exact' or 'mcmc'")
        if self.mode == "exact" and max(self.volumes) > self.cap:
            raise CapExceeded(f"exact mode needs n <= {self.cap}")


def model_parameter(model: CouplingModel):
    if isinstance(model, PowerLaw):
        return model.p
    if isinstance(model, Hierarchical):
        return model.alpha
    return None


def gap_estimate(pot: IsingPotential, n: int, config: ProbeConfig) -> GapEstimate:
    plus, minus = BoundaryCondition.all_plus(), BoundaryCondition.all_minus()
    if config.mode == "exact":
        sp = exact_system(pot, n, plus, config.depth, config.cap)
        sm = exact_system(pot, n, minus, config.depth, config.cap)
        return GapEstimate(n, pot.beta, sp.magnetization(), sm.magnetization(),
                           depth=sp.depth, eps=sp.eps, mode="exact")
    ep = mcmc_magnetization(pot, n, plus, config.depth, config.mcmc)
    em = mcmc_magnetization(pot, n, minus, config.depth, config.mcmc)
    return GapEstimate(n, pot.beta, ep.mean, em.mean, math.hypot(ep.stderr, em.stderr),
                       min(ep.ess, em.ess), ep.depth, ep.eps, "mcmc")


def bc_gap_scan(config: ProbeConfig) -> list[dict]:
    """Rows per (beta, n) in declared grid order, with the trend column gap(n)/gap(n/2)."""
    rows = []
    for beta in config.betas:
        pot = IsingPotential(config.model, float(beta))
        gaps = {}
        for n in config.volumes:
            est = gap_estimate(pot, int(n), config)
            gaps[int(n)] = est.gap
            half = gaps.get(int(n) // 2) if n % 2 == 0 else None
            ratio = est.gap / half if half not in (None, 0.0) else math.nan
            rows.append({"model": config.model.label(), "p_or_alpha": model_parameter(config.model),
                         "beta": float(beta), "n": int(n), "mode": est.mode,
                         "m_plus": est.m_plus, "m_minus": est.m_minus, "gap": est.gap,
                         "stderr": est.stderr, "ess": est.ess, "D": est.depth, "epsD": est.eps,
                         "seed": config.mcmc.seed if est.mode == "mcmc" else None,
                         "gap_ratio_half": ratio})
    return rows


PROBE_COLUMNS = ("model", "p_or_alpha", "beta", "n", "mode", "m_plus", "m_minus", "gap",
                 "stderr", "ess", "D", "epsD", "seed", "gap_ratio_half")
