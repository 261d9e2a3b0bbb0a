"""Numerical substrate: dense linear algebra, integration, Riccati solvers, RNG."""

from .linalg import (
    PIVOT_TOL,
    as_matrix,
    cholesky,
    expm,
    fro_norm,
    inverse,
    mat_add,
    mat_mul,
    solve,
    transpose,
)
from .statespace import LinearStateSpace, zoh_discretize
from .integrate import rk4_step
from .stability import char_poly, is_hurwitz, is_hurwitz_poly
from .riccati import solve_care, solve_lyapunov
from .frequency import freq_response
from .rng import RngStream, derive_stream

__all__ = [
    "PIVOT_TOL",
    "LinearStateSpace",
    "RngStream",
    "as_matrix",
    "char_poly",
    "cholesky",
    "derive_stream",
    "expm",
    "freq_response",
    "fro_norm",
    "inverse",
    "is_hurwitz",
    "is_hurwitz_poly",
    "mat_add",
    "mat_mul",
    "rk4_step",
    "solve",
    "solve_care",
    "solve_lyapunov",
    "transpose",
    "zoh_discretize",
]
