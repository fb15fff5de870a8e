"""Pseudo-stress PolyDG solvers for the unsteady Stokes problem."""

from ._core import (
    ConfigError,
    Mesh,
    Solver,
    System,
    cond_table,
    config_hash,
    convergence,
    iter_table,
    random_sigma,
)

__all__ = [
    "ConfigError",
    "Mesh",
    "Solver",
    "System",
    "cond_table",
    "config_hash",
    "convergence",
    "csr_matrix",
    "iter_table",
    "random_sigma",
]


def csr_matrix(parts):
    """Build a scipy CSR matrix from the (shape, indptr, indices, data) tuple."""
    import scipy.sparse

    shape, indptr, indices, data = parts
    return scipy.sparse.csr_matrix((data, indices, indptr), shape=shape)
