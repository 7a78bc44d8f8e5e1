"""Numpy reference implementations of the per-snapshot hot kernels.

The compiled backend (``_compiled``) mirrors this module function for
function; both must agree to near machine precision on the same inputs.

Shared conventions: snapshot cubes have shape ``(n_h, n_v, k)``, full
snapshot matrices ``(n, k)``, and all complex data is complex128.
"""

from __future__ import annotations

import numpy as np


def sample_second_order(x: np.ndarray, s_d: np.ndarray):
    """Sample covariance and cross-covariance against a reference stream.

    Parameters
    ----------
    x : (n, k) complex ndarray
    s_d : (k,) complex ndarray

    Returns
    -------
    cov : (n, n) ndarray, ``x x^H / k`` (exactly Hermitian)
    cross : (n,) ndarray, ``x conj(s_d) / k``
    """
    x = np.asarray(x, dtype=np.complex128)
    s_d = np.asarray(s_d, dtype=np.complex128)
    k = x.shape[1]
    cov = x @ x.conj().T / k
    cov = 0.5 * (cov + cov.conj().T)
    cross = x @ s_d.conj() / k
    return cov, cross


def cofiltered_second_order(xcube: np.ndarray, w_co: np.ndarray, s_d: np.ndarray, axis: int):
    """Second-order statistics of snapshots reduced by a fixed co-filter.

    ``axis == 0`` keeps the horizontal dimension (each snapshot matrix is
    right-multiplied by ``conj(w_co)``); ``axis == 1`` keeps the vertical
    dimension (left factor contracted with ``conj(w_co)``).
    """
    xcube = np.asarray(xcube, dtype=np.complex128)
    w_co = np.asarray(w_co, dtype=np.complex128)
    if axis == 0:
        u = np.einsum("hvk,v->hk", xcube, w_co.conj())
    elif axis == 1:
        u = np.einsum("hvk,h->vk", xcube, w_co.conj())
    else:
        raise ValueError(f"axis must be 0 or 1, got {axis}")
    return sample_second_order(u, s_d)


def bilinear_output(xcube: np.ndarray, w_h: np.ndarray, w_v: np.ndarray) -> np.ndarray:
    """Per-snapshot bilinear filter output ``w_h^H X[k] conj(w_v)``."""
    xcube = np.asarray(xcube, dtype=np.complex128)
    return np.einsum(
        "hvk,h,v->k",
        xcube,
        np.asarray(w_h, dtype=np.complex128).conj(),
        np.asarray(w_v, dtype=np.complex128).conj(),
    )


def _phase_table(n: int, grid: np.ndarray) -> np.ndarray:
    # (n, len(grid)) table of exp(1j*pi*row*cosine)
    return np.exp(1j * np.pi * np.arange(n)[:, None] * np.asarray(grid, dtype=np.float64)[None, :])


def af_grid_full(w_mat: np.ndarray, p_grid: np.ndarray, q_grid: np.ndarray) -> np.ndarray:
    """Unnormalized power pattern of a full filter on a cosine grid.

    ``w_mat`` is the filter reshaped to ``(n_h, n_v)`` column-major; the
    result has shape ``(len(p_grid), len(q_grid))``.
    """
    w_mat = np.asarray(w_mat, dtype=np.complex128)
    e_h = _phase_table(w_mat.shape[0], p_grid)
    e_v = _phase_table(w_mat.shape[1], q_grid)
    g = e_h.T @ w_mat.conj() @ e_v
    return np.abs(g) ** 2


def af_grid_separable(w_h: np.ndarray, w_v: np.ndarray, p_grid: np.ndarray, q_grid: np.ndarray) -> np.ndarray:
    """Unnormalized power pattern of a separable filter (product form)."""
    w_h = np.asarray(w_h, dtype=np.complex128)
    w_v = np.asarray(w_v, dtype=np.complex128)
    g_h = np.abs(_phase_table(w_h.shape[0], p_grid).T @ w_h.conj()) ** 2
    g_v = np.abs(_phase_table(w_v.shape[0], q_grid).T @ w_v.conj()) ** 2
    return np.outer(g_h, g_v)
