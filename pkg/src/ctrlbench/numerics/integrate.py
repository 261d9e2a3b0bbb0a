"""Fixed-step classical Runge-Kutta integration."""

import numpy as np

from ..errors import DivergenceError


def rk4_step(f, x, u, dt, t=0.0):
    """One classical 4th-order Runge-Kutta step of dx/dt = f(x, u).

    The input ``u`` is held constant over the step (zero-order hold).
    Raises DivergenceError (carrying ``t``) if any stage or the result is
    non-finite.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    x = np.asarray(x, dtype=float)
    k1 = np.asarray(f(x, u), dtype=float)
    k2 = np.asarray(f(x + 0.5 * dt * k1, u), dtype=float)
    k3 = np.asarray(f(x + 0.5 * dt * k2, u), dtype=float)
    k4 = np.asarray(f(x + dt * k3, u), dtype=float)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"non-finite state derivative at t={t:g}", time=t)
    return out
