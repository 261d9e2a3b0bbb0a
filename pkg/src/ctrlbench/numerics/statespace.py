"""Linear state-space triple (A, B, C)."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError
from .linalg import as_matrix


@dataclass(frozen=True)
class LinearStateSpace:
    """Strictly proper linear system  dx/dt = A x + B u,  y = C x."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a)
        b = as_matrix(self.b)
        c = as_matrix(self.c)
        if a.shape[0] != a.shape[1]:
            raise DimensionError(f"A must be square, got {a.shape}")
        n = a.shape[0]
        if b.shape[0] != n:
            raise DimensionError(f"B rows {b.shape[0]} != state dim {n}")
        if c.shape[1] != n:
            raise DimensionError(f"C cols {c.shape[1]} != state dim {n}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n_states(self):
        return self.a.shape[0]

    @property
    def n_inputs(self):
        return self.b.shape[1]

    @property
    def n_outputs(self):
        return self.c.shape[0]

    def derivative(self, x, u):
        return self.a @ x + self.b @ np.atleast_1d(u)

    def output(self, x):
        return self.c @ x


def zoh_discretize(a, b, dt):
    """(A_d, B_d) of the zero-order-hold discretisation at sample time dt."""
    from .linalg import expm

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = a.shape[0], b.shape[1]
    blk = np.zeros((n + m, n + m))
    blk[:n, :n] = a
    blk[:n, n:] = b
    e = expm(blk * dt)
    return e[:n, :n], e[:n, n:]
