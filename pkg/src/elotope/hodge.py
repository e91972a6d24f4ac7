"""Combinatorial Hodge operators on rating vectors and skew-symmetric matrices.

A skew-symmetric comparison matrix splits uniquely into a transitive part
(the image of ``grad``) and a cyclic part (zero row means). Everything here
is a pure function of plain ``numpy`` arrays.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

SKEW_TOL = 1e-12

Array = npt.NDArray[np.float64]


def check_skew(a: npt.ArrayLike, tol: float = SKEW_TOL) -> Array:
    """Return ``a`` as a float array, raising ``ValueError`` unless it is finite and skew."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    err = np.max(np.abs(a + a.T))
    if err > tol:
        raise ValueError(f"matrix is not skew-symmetric (max |A + A^T| = {err:.3g})")
    return a


def grad(v: npt.ArrayLike) -> Array:
    """Combinatorial gradient: ``M[i, j] = v[i] - v[j]``."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("grad expects a non-empty vector")
    return v[:, None] - v[None, :]


def div(a: npt.ArrayLike) -> Array:
    """Combinatorial divergence: the mean of each row."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"div expects a square matrix, got shape {a.shape}")
    return a.mean(axis=1)


def rot(a: npt.ArrayLike) -> Array:
    """Rotation (cyclic projector).

    Computed by direct summation ``(1/m) * sum_k (A_ij + A_jk + A_ki)`` so it
    can be checked against ``A - grad(div(A))``.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    # sum_k A_jk is the j-th row sum; sum_k A_ki is the i-th column sum
    row = a.sum(axis=1)
    col = a.sum(axis=0)
    return (m * a + row[None, :] + col[:, None]) / m


def hodge_decompose(a: npt.ArrayLike) -> tuple[Array, Array]:
    """Split a skew matrix into ``(transitive, cyclic)`` parts.

    ``transitive = grad(div(a))`` and ``cyclic = a - transitive``; the two are
    orthogonal under the elementwise inner product.
    """
    a = check_skew(a)
    transitive = grad(div(a))
    return transitive, a - transitive


def frobenius_norm(a: npt.ArrayLike) -> float:
    return float(np.sqrt(np.sum(np.square(np.asarray(a, dtype=float)))))


def inner(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Elementwise matrix inner product ``sum_ij a_ij * b_ij``."""
    return float(np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float)))


def is_stacm(a: npt.ArrayLike, tol: float = 1e-9) -> bool:
    """True iff the cyclic component has Frobenius norm at most ``tol``."""
    _, cyclic = hodge_decompose(a)
    return frobenius_norm(cyclic) <= tol


def center(v: npt.ArrayLike) -> Array:
    """Sum-zero representative of a rating vector."""
    v = np.asarray(v, dtype=float)
    return v - v.mean()
