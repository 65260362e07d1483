"""Consensus ALADIN and consensus ADMM for distributed consensus optimization."""

from ._core import (
    ALGORITHMS,
    CSV_HEADER,
    ConfigError,
    LinalgError,
    Problem,
    ReferenceSolution,
    SubproblemFailure,
    centralized_solve,
    cholesky_lower,
    comm_floats,
    compare,
    damped_bfgs_update,
    energy,
    kkt_oracle,
    make_problem,
    min_eig_lower_bound,
    multistart_reference,
    recover_gradient,
    run,
    update_global_bfgs,
    update_global_reduced,
)

__all__ = [
    "ALGORITHMS",
    "CSV_HEADER",
    "ConfigError",
    "LinalgError",
    "Problem",
    "ReferenceSolution",
    "SubproblemFailure",
    "centralized_solve",
    "cholesky_lower",
    "comm_floats",
    "compare",
    "damped_bfgs_update",
    "energy",
    "kkt_oracle",
    "make_problem",
    "min_eig_lower_bound",
    "multistart_reference",
    "recover_gradient",
    "run",
    "update_global_bfgs",
    "update_global_reduced",
]
