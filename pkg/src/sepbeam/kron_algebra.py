"""Dense complex Kronecker, Khatri-Rao and order-3 tensor kernels.

All tensor routines use the unfolding convention in which mode-``n`` fibers
become columns ordered with the earliest remaining index varying fastest
(column-major fiber ordering). Worked 2x2x2 example, ``t[i, j, k] = 100*i +
10*j + k`` with zero-based indices::

    unfold(t, 1) == [[  0,  10,   1,  11],
                     [100, 110, 101, 111]]
    unfold(t, 2) == [[  0, 100,   1, 101],
                     [ 10, 110,  11, 111]]
    unfold(t, 3) == [[  0, 100,  10, 110],
                     [  1, 101,  11, 111]]

Under this convention the mode-1/mode-2 unfoldings of a separable steering
tensor are the horizontal/vertical block concatenations consumed by the
alternating sub-filter updates, and the mode-3 unfolding equals the
transposed Khatri-Rao steering matrix.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

__all__ = [
    "SingularMatrixError",
    "kron",
    "khatri_rao",
    "unfold",
    "fold",
    "mode3_product",
    "hermitian_solve",
    "pseudo_inverse",
    "condition_number_2",
    "vector_angle",
]

# Relative tolerance accepted on ||m - m^H|| before a solve refuses the input.
_HERMITIAN_RTOL = 1e-10
# A factorization pivot below this fraction of the largest pivot is singular.
_PIVOT_RTOL = 1e-14


class SingularMatrixError(RuntimeError):
    """Raised when a factorization detects a numerically singular matrix."""


def _as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices (or vectors, treated as columns)."""
    return np.kron(_as_complex(a), _as_complex(b))


def khatri_rao(a, b) -> np.ndarray:
    """Column-wise Kronecker product.

    Parameters
    ----------
    a : (m, r) array_like
    b : (n, r) array_like

    Returns
    -------
    (m*n, r) ndarray with column ``j`` equal to ``kron(a[:, j], b[:, j])``.
    """
    a = np.atleast_2d(_as_complex(a))
    b = np.atleast_2d(_as_complex(b))
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"column-count mismatch: a has {a.shape[1]} columns, b has {b.shape[1]}"
        )
    m, r = a.shape
    n = b.shape[0]
    # (i, k) -> i*n + k matches the Kronecker stacking of each column pair.
    return (a[:, None, :] * b[None, :, :]).reshape(m * n, r)


def unfold(t, mode: int) -> np.ndarray:
    """Mode-``mode`` unfolding of an order-3 tensor (modes numbered 1..3).

    Columns are the mode fibers ordered with the earliest remaining index
    varying fastest; see the module docstring for a worked example.
    """
    t = _as_complex(t)
    if t.ndim != 3:
        raise ValueError(f"expected an order-3 tensor, got ndim={t.ndim}")
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode}")
    return np.reshape(
        np.moveaxis(t, mode - 1, 0), (t.shape[mode - 1], -1), order="F"
    )


def fold(m, mode: int, shape: tuple[int, int, int]) -> np.ndarray:
    """Inverse of :func:`unfold` for the given original tensor ``shape``."""
    m = _as_complex(m)
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode}")
    if len(shape) != 3:
        raise ValueError("shape must have three entries")
    moved = [shape[mode - 1]] + [s for i, s in enumerate(shape) if i != mode - 1]
    return np.moveaxis(np.reshape(m, moved, order="F"), 0, mode - 1)


def mode3_product(t, v) -> np.ndarray:
    """Contract the third mode of ``t`` with the vector ``v``.

    Returns the matrix ``sum_r v[r] * t[:, :, r]``.
    """
    t = _as_complex(t)
    v = _as_complex(v)
    if t.ndim != 3:
        raise ValueError(f"expected an order-3 tensor, got ndim={t.ndim}")
    if v.ndim != 1 or v.shape[0] != t.shape[2]:
        raise ValueError(
            f"vector length {v.shape} does not match third mode {t.shape[2]}"
        )
    return np.tensordot(t, v, axes=([2], [0]))


def hermitian_solve(m, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` for Hermitian ``m``.

    Tries a Cholesky factorization first and falls back to partially pivoted
    LU when ``m`` is indefinite. Singularity (any pivot below ``1e-14`` of
    the largest) raises :class:`SingularMatrixError` instead of returning
    garbage; callers decide how to handle the failed design.

    Parameters
    ----------
    m : (n, n) array_like
        Hermitian up to relative tolerance 1e-10.
    rhs : (n,) or (n, k) array_like

    Returns
    -------
    ndarray with the shape of ``rhs``.
    """
    m = _as_complex(m)
    rhs = _as_complex(rhs)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if rhs.shape[0] != m.shape[0]:
        raise ValueError(
            f"rhs leading dimension {rhs.shape[0]} does not match matrix {m.shape[0]}"
        )
    mnorm = np.linalg.norm(m)
    if np.linalg.norm(m - m.conj().T) > _HERMITIAN_RTOL * max(mnorm, 1e-300):
        raise ValueError("matrix is not Hermitian within tolerance")

    try:
        c, low = scipy.linalg.cho_factor(m, check_finite=False)
    except np.linalg.LinAlgError:
        c = None
    if c is not None:
        piv = np.abs(np.diagonal(c)) ** 2
        if piv.min() < _PIVOT_RTOL * piv.max():
            raise SingularMatrixError("Cholesky pivot below singularity threshold")
        return scipy.linalg.cho_solve((c, low), rhs, check_finite=False)

    with warnings.catch_warnings():
        # exact-zero pivots are detected below; scipy's advisory is noise here
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, ipiv = scipy.linalg.lu_factor(m, check_finite=False)
    piv = np.abs(np.diagonal(lu))
    if piv.max() == 0.0 or piv.min() < _PIVOT_RTOL * piv.max():
        raise SingularMatrixError("LU pivot below singularity threshold")
    return scipy.linalg.lu_solve((lu, ipiv), rhs, check_finite=False)


def pseudo_inverse(m) -> np.ndarray:
    """Moore-Penrose pseudo-inverse (SVD based)."""
    return np.linalg.pinv(_as_complex(m))


def condition_number_2(m) -> float:
    """Spectral (2-norm) condition number; ``inf`` for singular input."""
    s = np.linalg.svd(_as_complex(m), compute_uv=False)
    if s.size == 0 or s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def vector_angle(u, v) -> float:
    """Principal angle (radians) between the complex lines spanned by u, v.

    Invariant to scaling of either argument by any nonzero complex number.
    """
    u = np.ravel(_as_complex(u))
    v = np.ravel(_as_complex(v))
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("angle with the zero vector is undefined")
    c = np.abs(np.vdot(u, v)) / (nu * nv)
    return float(np.arccos(min(1.0, c)))
