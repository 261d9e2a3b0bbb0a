"""Continuous Lyapunov and algebraic Riccati solvers.

The CARE solver integrates the differential Riccati flow

    dP/dtau = A'P + PA - P B R^-1 B' P + Q,   P(0) = 0

with fixed-step RK4 until successive sweeps agree, then polishes with
Newton-Kleinman steps (each one a Lyapunov solve) until the algebraic
residual is below 1e-8.  No Schur decomposition is needed; every plant in
the catalog has n <= 5, so the n^2-sized Kronecker systems are cheap.
"""

import numpy as np

from ..errors import DesignFailureError, NonHurwitzError, SingularMatrixError
from .integrate import rk4_step
from .linalg import cholesky, fro_norm, inverse, is_psd, solve
from .stability import is_hurwitz

CARE_RESIDUAL_TOL = 1e-8
_SWEEP_TOL = 1e-10
_MAX_STEPS = 200_000
_NEWTON_BUDGET = 25


def solve_lyapunov(a, q):
    """Solve A'P + PA + Q = 0 for symmetric P.

    Requires A Hurwitz (checked with the Routh probe) and symmetric Q.
    Solved by Kronecker vectorisation and a dense partial-pivot solve.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    n = a.shape[0]
    if fro_norm(q - q.T) > 1e-9 * (1.0 + fro_norm(q)):
        raise NonHurwitzError("solve_lyapunov requires symmetric Q")
    if not is_hurwitz(a):
        raise NonHurwitzError("solve_lyapunov requires a Hurwitz A matrix")
    eye = np.eye(n)
    # Column-major vec: vec(A'P) = (I (x) A') vec(P), vec(PA) = (A' (x) I) vec(P).
    kron = np.kron(eye, a.T) + np.kron(a.T, eye)
    try:
        p_vec = solve(kron, -q.flatten(order="F"))
    except SingularMatrixError as exc:
        raise NonHurwitzError(f"singular Lyapunov system: {exc}") from exc
    p = p_vec.reshape((n, n), order="F")
    return 0.5 * (p + p.T)


def care_residual(a, b, q, r_inv, p):
    s = b @ r_inv @ b.T
    return a.T @ p + p @ a - p @ s @ p + q


def solve_care(a, b, q, r):
    """Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0.

    Returns (P, K) with K = R^-1 B' P.  Requires (A, B) stabilizable,
    Q symmetric PSD and R symmetric PD; the closed loop A - BK is verified
    Hurwitz before returning.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    n = a.shape[0]
    if b.ndim == 1:
        b = b[:, None]
    if not is_psd(q):
        raise DesignFailureError("Q must be symmetric positive semidefinite")
    try:
        cholesky(r)
    except SingularMatrixError as exc:
        raise DesignFailureError(f"R must be symmetric positive definite: {exc}") from exc
    r_inv = inverse(r)
    s = b @ r_inv @ b.T

    def flow(p_flat, _):
        p = p_flat.reshape((n, n))
        return care_residual(a, b, q, r_inv, p).reshape(-1)

    # Step size sized against the flow's local stiffness; halved on blow-up.
    dt = 0.5 / (1.0 + fro_norm(a) + np.sqrt(fro_norm(q) * fro_norm(s)))
    p = np.zeros((n, n))
    steps = 0
    sweep = 20
    while steps < _MAX_STEPS:
        p_prev = p
        try:
            for _ in range(sweep):
                p_flat = rk4_step(flow, p.reshape(-1), None, dt)
                p = p_flat.reshape((n, n))
            p = 0.5 * (p + p.T)
        except Exception:
            dt *= 0.5
            p = np.zeros((n, n))
            steps = 0
            if dt < 1e-12:
                raise DesignFailureError("Riccati flow diverged at all step sizes") from None
            continue
        steps += sweep
        if not np.all(np.isfinite(p)) or fro_norm(p) > 1e12:
            dt *= 0.5
            p = np.zeros((n, n))
            steps = 0
            continue
        # Keep RK4 stable as P (and the closed-loop rates) grow.
        stiff = fro_norm(a) + fro_norm(s @ p)
        if dt > 1.0 / (1.0 + stiff):
            dt = 1.0 / (1.0 + stiff)
        if fro_norm(p - p_prev) < _SWEEP_TOL * (1.0 + fro_norm(p)):
            break
    else:
        raise DesignFailureError("Riccati flow did not converge within the step budget")

    # Newton-Kleinman polish: quadratic convergence from the integrated P.
    for _ in range(_NEWTON_BUDGET):
        k = r_inv @ b.T @ p
        a_cl = a - b @ k
        if not is_hurwitz(a_cl):
            raise DesignFailureError("integrated Riccati solution is not stabilizing")
        if fro_norm(care_residual(a, b, q, r_inv, p)) < CARE_RESIDUAL_TOL:
            break
        p = solve_lyapunov(a_cl, q + k.T @ r @ k)
    else:
        raise DesignFailureError("Newton polish did not reach the residual tolerance")

    k = r_inv @ b.T @ p
    if not is_hurwitz(a - b @ k):
        raise DesignFailureError("closed loop failed the Routh stability check")
    return p, k
