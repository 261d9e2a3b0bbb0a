"""Complex frequency response of linear state-space systems."""

import numpy as np

from .linalg import solve


def freq_response(sys, omega):
    """Evaluate G(j*omega) = C (j*omega*I - A)^-1 B.

    Returns the complex p x m response matrix.  Raises SingularMatrixError
    when omega sits exactly on an imaginary-axis pole.
    """
    n = sys.n_states
    jw = 1j * float(omega) * np.eye(n) - sys.a.astype(complex)
    x = solve(jw, sys.b.astype(complex))
    return sys.c.astype(complex) @ x
