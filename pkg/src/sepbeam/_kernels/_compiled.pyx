# cython: language_level=3
"""Typed fused-loop implementations of the per-snapshot hot kernels.

Mirrors ``_python.py`` function for function; the backend-equivalence tests
hold both to the same outputs. Loops favour snapshot-major traversal so each
snapshot's slice stays in cache.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, sin

cnp.import_array()


cdef inline double complex _cis(double phase) noexcept nogil:
    return cos(phase) + 1j * sin(phase)


cdef void _acc_second_order(
    double complex[:, ::1] u,
    double complex[::1] s_d,
    double complex[:, ::1] cov,
    double complex[::1] cross,
) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0], k = u.shape[1]
    cdef Py_ssize_t t, i, j
    cdef double complex ui, sc
    for t in range(k):
        sc = s_d[t].conjugate()
        for i in range(n):
            ui = u[i, t]
            cross[i] = cross[i] + ui * sc
            for j in range(i, n):
                cov[i, j] = cov[i, j] + ui * u[j, t].conjugate()
    cdef double inv_k = 1.0 / k
    for i in range(n):
        cross[i] = cross[i] * inv_k
        for j in range(i, n):
            cov[i, j] = cov[i, j] * inv_k
            if j > i:
                cov[j, i] = cov[i, j].conjugate()


def sample_second_order(x, s_d):
    """Sample covariance/cross-covariance; see the numpy twin for docs."""
    cdef double complex[:, ::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef double complex[::1] sv = np.ascontiguousarray(s_d, dtype=np.complex128)
    if xv.shape[1] != sv.shape[0]:
        raise ValueError("snapshot counts of x and s_d differ")
    cov = np.zeros((xv.shape[0], xv.shape[0]), dtype=np.complex128)
    cross = np.zeros(xv.shape[0], dtype=np.complex128)
    cdef double complex[:, ::1] cov_v = cov
    cdef double complex[::1] cross_v = cross
    with nogil:
        _acc_second_order(xv, sv, cov_v, cross_v)
    return cov, cross


def cofiltered_second_order(xcube, w_co, s_d, int axis):
    """Second-order stats of co-filter-reduced snapshots (axis 0 or 1)."""
    if axis not in (0, 1):
        raise ValueError(f"axis must be 0 or 1, got {axis}")
    cdef double complex[:, :, ::1] cv = np.ascontiguousarray(xcube, dtype=np.complex128)
    cdef double complex[::1] wv = np.ascontiguousarray(w_co, dtype=np.complex128)
    cdef double complex[::1] sv = np.ascontiguousarray(s_d, dtype=np.complex128)
    cdef Py_ssize_t n_h = cv.shape[0], n_v = cv.shape[1], k = cv.shape[2]
    cdef Py_ssize_t m = n_h if axis == 0 else n_v
    cdef Py_ssize_t co = n_v if axis == 0 else n_h
    if wv.shape[0] != co:
        raise ValueError("co-filter length does not match the contracted axis")
    if sv.shape[0] != k:
        raise ValueError("snapshot counts of xcube and s_d differ")
    u = np.zeros((m, k), dtype=np.complex128)
    cdef double complex[:, ::1] uv = u
    cdef Py_ssize_t t, i, j
    cdef double complex acc
    with nogil:
        if axis == 0:
            for t in range(k):
                for i in range(n_h):
                    acc = 0
                    for j in range(n_v):
                        acc = acc + cv[i, j, t] * wv[j].conjugate()
                    uv[i, t] = acc
        else:
            for t in range(k):
                for j in range(n_v):
                    acc = 0
                    for i in range(n_h):
                        acc = acc + cv[i, j, t] * wv[i].conjugate()
                    uv[j, t] = acc
    cov = np.zeros((m, m), dtype=np.complex128)
    cross = np.zeros(m, dtype=np.complex128)
    cdef double complex[:, ::1] cov_v = cov
    cdef double complex[::1] cross_v = cross
    with nogil:
        _acc_second_order(uv, sv, cov_v, cross_v)
    return cov, cross


def bilinear_output(xcube, w_h, w_v):
    """Per-snapshot bilinear output ``w_h^H X[k] conj(w_v)``."""
    cdef double complex[:, :, ::1] cv = np.ascontiguousarray(xcube, dtype=np.complex128)
    cdef double complex[::1] whv = np.ascontiguousarray(w_h, dtype=np.complex128)
    cdef double complex[::1] wvv = np.ascontiguousarray(w_v, dtype=np.complex128)
    cdef Py_ssize_t n_h = cv.shape[0], n_v = cv.shape[1], k = cv.shape[2]
    if whv.shape[0] != n_h or wvv.shape[0] != n_v:
        raise ValueError("filter lengths do not match the snapshot cube")
    y = np.zeros(k, dtype=np.complex128)
    cdef double complex[::1] yv = y
    cdef Py_ssize_t t, i, j
    cdef double complex row, acc
    with nogil:
        for t in range(k):
            acc = 0
            for i in range(n_h):
                row = 0
                for j in range(n_v):
                    row = row + cv[i, j, t] * wvv[j].conjugate()
                acc = acc + whv[i].conjugate() * row
            yv[t] = acc
    return y


def af_grid_full(w_mat, p_grid, q_grid):
    """Unnormalized power pattern of a full (n_h, n_v) filter matrix."""
    cdef double complex[:, ::1] wv = np.ascontiguousarray(w_mat, dtype=np.complex128)
    cdef double[::1] pv = np.ascontiguousarray(p_grid, dtype=np.float64)
    cdef double[::1] qv = np.ascontiguousarray(q_grid, dtype=np.float64)
    cdef Py_ssize_t n_h = wv.shape[0], n_v = wv.shape[1]
    cdef Py_ssize_t np_ = pv.shape[0], nq = qv.shape[0]
    out = np.zeros((np_, nq), dtype=np.float64)
    cdef double[:, ::1] ov = out
    e_v_arr = np.zeros((n_v, nq), dtype=np.complex128)
    cdef double complex[:, ::1] e_v = e_v_arr
    tmp_arr = np.zeros(n_v, dtype=np.complex128)
    cdef double complex[::1] tmp = tmp_arr
    cdef Py_ssize_t ip, iq, i, j
    cdef double complex acc, eh
    cdef double mag
    with nogil:
        for j in range(n_v):
            for iq in range(nq):
                e_v[j, iq] = _cis(M_PI * j * qv[iq])
        for ip in range(np_):
            for j in range(n_v):
                acc = 0
                for i in range(n_h):
                    eh = _cis(M_PI * i * pv[ip])
                    acc = acc + eh * wv[i, j].conjugate()
                tmp[j] = acc
            for iq in range(nq):
                acc = 0
                for j in range(n_v):
                    acc = acc + tmp[j] * e_v[j, iq]
                mag = acc.real * acc.real + acc.imag * acc.imag
                ov[ip, iq] = mag
    return out


def af_grid_separable(w_h, w_v, p_grid, q_grid):
    """Unnormalized power pattern of a separable filter (product form)."""
    cdef double complex[::1] whv = np.ascontiguousarray(w_h, dtype=np.complex128)
    cdef double complex[::1] wvv = np.ascontiguousarray(w_v, dtype=np.complex128)
    cdef double[::1] pv = np.ascontiguousarray(p_grid, dtype=np.float64)
    cdef double[::1] qv = np.ascontiguousarray(q_grid, dtype=np.float64)
    cdef Py_ssize_t np_ = pv.shape[0], nq = qv.shape[0]
    g_h = np.zeros(np_, dtype=np.float64)
    g_v = np.zeros(nq, dtype=np.float64)
    cdef double[::1] ghv = g_h
    cdef double[::1] gvv = g_v
    cdef Py_ssize_t ip, iq, i
    cdef double complex acc
    with nogil:
        for ip in range(np_):
            acc = 0
            for i in range(whv.shape[0]):
                acc = acc + whv[i].conjugate() * _cis(M_PI * i * pv[ip])
            ghv[ip] = acc.real * acc.real + acc.imag * acc.imag
        for iq in range(nq):
            acc = 0
            for i in range(wvv.shape[0]):
                acc = acc + wvv[i].conjugate() * _cis(M_PI * i * qv[iq])
            gvv[iq] = acc.real * acc.real + acc.imag * acc.imag
    return np.outer(g_h, g_v)
