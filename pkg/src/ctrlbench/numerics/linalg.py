"""Dense matrix helpers on 2-D numpy arrays.

Inversion and linear solves use Gauss elimination with partial pivoting and a
fixed singularity tolerance (pivot magnitude below ``PIVOT_TOL`` fails), so
near-singular systems fail loudly instead of returning garbage.  The routines
accept complex matrices; pivoting compares magnitudes.
"""

import numpy as np

from ..errors import DimensionError, SingularMatrixError

# Pivot magnitudes below this are treated as singular.  Fixed, not configurable.
PIVOT_TOL = 1e-12


def as_matrix(entries, dtype=float):
    """Validate and return a finite 2-D array."""
    a = np.asarray(entries, dtype=dtype)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("matrix entries must be finite")
    return a


def mat_add(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"add shape mismatch: {a.shape} vs {b.shape}")
    return a + b


def mat_mul(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[-1] != b.shape[0]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} vs {b.shape}")
    return a @ b


def transpose(a):
    return np.asarray(a).T


def fro_norm(a):
    return float(np.sqrt(np.sum(np.abs(np.asarray(a)) ** 2)))


def solve(a, b):
    """Solve a x = b by Gauss elimination with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.  Raises
    SingularMatrixError when the largest available pivot falls below
    ``PIVOT_TOL`` (scaled by the matrix magnitude).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"solve requires a square matrix, got {a.shape}")
    n = a.shape[0]
    b = np.asarray(b)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if b.shape[0] != n:
        raise DimensionError(f"rhs rows {b.shape[0]} != matrix size {n}")

    dtype = np.result_type(a.dtype, b.dtype, float)
    aug = np.hstack([a.astype(dtype, copy=True), b.astype(dtype, copy=True)])
    scale = max(np.max(np.abs(a)), 1.0)
    tol = PIVOT_TOL * scale

    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if np.abs(aug[piv, col]) < tol:
            raise SingularMatrixError(f"singular matrix (pivot < {tol:g} at column {col})")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        factors = aug[col + 1 :, col] / aug[col, col]
        aug[col + 1 :, col:] -= np.outer(factors, aug[col, col:])

    x = np.zeros((n, b.shape[1]), dtype=dtype)
    for row in range(n - 1, -1, -1):
        x[row] = (aug[row, n:] - aug[row, row + 1 : n] @ x[row + 1 :]) / aug[row, row]
    return x[:, 0] if vector_rhs else x


def inverse(a):
    """Matrix inverse via partial-pivot elimination against the identity."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"inverse requires a square matrix, got {a.shape}")
    eye = np.eye(a.shape[0], dtype=np.result_type(a.dtype, float))
    return solve(a, eye)


def cholesky(a, tol=0.0):
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    Used as the positive-definiteness test for weight matrices; raises
    SingularMatrixError when a diagonal entry drops to ``tol`` or below.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"cholesky requires a square matrix, got {a.shape}")
    if fro_norm(a - a.T) > 1e-9 * (1.0 + fro_norm(a)):
        raise DimensionError("cholesky requires a symmetric matrix")
    n = a.shape[0]
    lower = np.zeros_like(a)
    for i in range(n):
        for j in range(i + 1):
            acc = a[i, j] - lower[i, :j] @ lower[j, :j]
            if i == j:
                if acc <= tol:
                    raise SingularMatrixError("matrix is not positive definite")
                lower[i, i] = np.sqrt(acc)
            else:
                lower[i, j] = acc / lower[j, j]
    return lower


def is_psd(a, rel_tol=1e-10):
    """Positive-semidefinite test via Cholesky of a + eps*I."""
    a = np.asarray(a, dtype=float)
    eps = rel_tol * (1.0 + fro_norm(a))
    try:
        cholesky(a + eps * np.eye(a.shape[0]))
    except SingularMatrixError:
        return False
    return True


def expm(a):
    """Matrix exponential by scaling-and-squaring with a Taylor series.

    Machine-precision for the small, well-scaled matrices used here (loop
    discretisation at dt = 0.1).
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionError(f"expm requires a square matrix, got {a.shape}")
    norm = float(np.max(np.abs(a))) * n
    k = max(0, int(np.ceil(np.log2(max(norm, 1e-16)))) + 1)
    s = a / (2.0**k)
    term = np.eye(n)
    out = np.eye(n)
    for i in range(1, 40):
        term = term @ s / i
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(k):
        out = out @ out
    return out
