"""Chains and one-sided Gibbs specifications on the half-line Z^- = {..., -2, -1, 0}.

Exact finite-window kernels for long-range Ising and hierarchical couplings,
the LSS <-> specification correspondence, past-sensitivity coefficients,
uniqueness / phase-transition criteria and finite-volume boundary probes.
"""

from halfchain.core import (
    ISING,
    Alphabet,
    BoundaryCondition,
    CapExceeded,
    FreeBoundaryQueried,
    OverlapOrGap,
    Window,
    WindowConfig,
    concat,
    enumerate_configs,
    tail_value,
)
from halfchain.couplings import (
    CouplingModel,
    DecayMeta,
    Hierarchical,
    IsingPotential,
    PowerLaw,
    PowerLog,
    Table,
    block_level,
    coupling,
    interaction_tail_bound,
    radial_profile,
)

__version__ = "0.1.0"

__all__ = [
    "ISING",
    "Alphabet",
    "BoundaryCondition",
    "CapExceeded",
    "CouplingModel",
    "DecayMeta",
    "FreeBoundaryQueried",
    "Hierarchical",
    "IsingPotential",
    "OverlapOrGap",
    "PowerLaw",
    "PowerLog",
    "Table",
    "Window",
    "WindowConfig",
    "block_level",
    "concat",
    "coupling",
    "enumerate_configs",
    "interaction_tail_bound",
    "radial_profile",
    "tail_value",
]
