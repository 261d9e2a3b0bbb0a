"""Stability tests via characteristic polynomial and the Routh array.

Avoids a general eigensolver: the characteristic polynomial comes from the
Faddeev-LeVerrier recursion and strict Hurwitz stability from the Routh
criterion, which is exact for the small systems used here (n <= 7).
"""

import numpy as np


def char_poly(a):
    """Coefficients of det(sI - A), highest power first (monic)."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.array(coeffs)


def is_hurwitz_poly(coeffs, tol=1e-9):
    """Routh test: True iff all polynomial roots have real part < 0.

    Marginal cases (a first-column entry within ``tol`` of zero, relative to
    the row scale) are reported as not Hurwitz; this is a strict test.
    """
    c = np.asarray(coeffs, dtype=float)
    c = np.trim_zeros(c, "f")
    if c.size == 0:
        return False
    if c[0] < 0:
        c = -c
    n = c.size - 1
    if n == 0:
        return True
    # Necessary condition: every coefficient strictly positive.
    scale = np.max(np.abs(c))
    if np.any(c <= tol * scale):
        return False

    width = (n + 2) // 2
    rows = np.zeros((n + 1, width + 1))
    rows[0, : len(c[0::2])] = c[0::2]
    rows[1, : len(c[1::2])] = c[1::2]
    for i in range(2, n + 1):
        pivot = rows[i - 1, 0]
        if abs(pivot) <= tol * scale:
            return False
        for j in range(width):
            rows[i, j] = (pivot * rows[i - 2, j + 1] - rows[i - 2, 0] * rows[i - 1, j + 1]) / pivot
        scale = max(scale, np.max(np.abs(rows[i])))
    first_col = rows[: n + 1, 0]
    return bool(np.all(first_col > 0.0))


def is_hurwitz(a, tol=1e-9):
    """True iff all eigenvalues of A have strictly negative real part."""
    return is_hurwitz_poly(char_poly(a), tol=tol)
