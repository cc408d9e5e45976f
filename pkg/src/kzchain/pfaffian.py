"""Pfaffian of an even-dimensional antisymmetric matrix.

Parlett-Reid tridiagonalization with partial pivoting: Gauss transforms
eliminate below the first subdiagonal two columns at a time, the Pfaffian
accumulating the subdiagonal pivots and a sign per row/column swap.
Works for real and complex matrices; cost O(n^3) with rank-2 outer-product
updates.
"""

from __future__ import annotations

import numpy as np

__all__ = ["pfaffian"]


def pfaffian(a: np.ndarray, skew_tol: float = 1e-12):
    """Pfaffian of the antisymmetric matrix a.

    Raises ValueError if a is not square with even dimension, or if
    max|a + a^T| exceeds skew_tol * max(1, max|a|).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n % 2 != 0:
        raise ValueError(f"Pfaffian requires even dimension, got {n}")
    if n == 0:
        return 1.0
    scale = max(1.0, float(np.max(np.abs(a))))
    residue = float(np.max(np.abs(a + a.T)))
    if residue > skew_tol * scale:
        raise ValueError(
            f"matrix is not antisymmetric: max|A + A^T| = {residue:g}"
        )

    m = np.array(a, dtype=np.result_type(a.dtype, float), copy=True)
    pf = m.dtype.type(1.0)
    for i in range(0, n - 2, 2):
        # pivot the largest entry of column i into row i+1
        col = np.abs(m[i + 1:, i])
        piv = i + 1 + int(np.argmax(col))
        if m[piv, i] == 0:
            return 0.0 * pf
        if piv != i + 1:
            m[[i + 1, piv], :] = m[[piv, i + 1], :]
            m[:, [i + 1, piv]] = m[:, [piv, i + 1]]
            pf = -pf
        pf *= m[i, i + 1]
        # eliminate the rest of rows/columns i, i+1 with a Gauss transform
        inv = 1.0 / m[i + 1, i]
        tau = m[i, i + 2:] * inv
        w = m[i + 1, i + 2:]
        m[i + 2:, i + 2:] += np.outer(tau, w) - np.outer(w, tau)
    pf *= m[n - 2, n - 1]
    return pf
