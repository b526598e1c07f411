"""Distributed Bayesian matrix decomposition.

Sparse basis / simplex-coefficient factorization of column-sharded data with
three interchangeable distributed basis solvers (agd, admm, cease) and
noise-weighted aggregation across heterogeneous shards.
"""

from ._core import (
    __version__,
    assign_clusters,
    empirical_variance_ratio,
    fit,
    gen_basis,
    gen_h_bernoulli,
    gen_h_dirichlet,
    hungarian_accuracy,
    soft_threshold,
    spectral_norm,
    update_h,
    variance_ratio_theoretical,
)

__all__ = [
    "__version__",
    "assign_clusters",
    "empirical_variance_ratio",
    "fit",
    "gen_basis",
    "gen_h_bernoulli",
    "gen_h_dirichlet",
    "hungarian_accuracy",
    "soft_threshold",
    "spectral_norm",
    "update_h",
    "variance_ratio_theoretical",
]
