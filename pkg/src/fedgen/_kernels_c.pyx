# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SGD kernels, the hot-loop backend.

Twin of ``_kernels_py``: identical update expressions and accumulation order,
compiled with -ffp-contract=off so iterates match the pure-Python backend bit
for bit.  Each round keeps the model as ``w = w_start - acc (+ noise_acc)``
with ``acc`` the running innovation sum.
"""

import numpy as np

from libc.math cimport isfinite

from .errors import NonFiniteIterateError

BACKEND = "c"


def chain_location(w0, feats, eta, noise=None, record=False):
    """Sequential one-sample steps on the squared-distance location loss."""
    cdef const double[::1] w0_v = np.ascontiguousarray(w0, dtype=np.float64)
    cdef const double[:, ::1] z_v = feats
    cdef const double[::1] eta_v = eta
    cdef const double[:, ::1] noise_v = noise if noise is not None else None
    cdef Py_ssize_t m = z_v.shape[0], d = z_v.shape[1]
    cdef bint keep = record
    cdef bint noisy = noise is not None

    w_arr = np.empty(d)
    acc_arr = np.zeros(d)
    nacc_arr = np.zeros(d)
    iters_arr = np.empty((m + 1, d)) if keep else None
    cdef double[::1] w = w_arr
    cdef double[::1] acc = acc_arr
    cdef double[::1] nacc = nacc_arr
    cdef double[:, ::1] iters = iters_arr if keep else None

    cdef Py_ssize_t t, j
    cdef double e, s, resid, u
    for j in range(d):
        w[j] = w0_v[j]
    if keep:
        for j in range(d):
            iters[0, j] = w[j]
    for t in range(m):
        e = eta_v[t]
        for j in range(d):
            u = e * (2.0 * (w[j] - z_v[t, j]))
            acc[j] += u
        if noisy:
            for j in range(d):
                nacc[j] += noise_v[t, j]
                w[j] = (w0_v[j] - acc[j]) + nacc[j]
        else:
            for j in range(d):
                w[j] = w0_v[j] - acc[j]
        if keep:
            for j in range(d):
                iters[t + 1, j] = w[j]
    for j in range(d):
        if not isfinite(w[j]):
            raise NonFiniteIterateError(f"non-finite iterate at step {m}")
    return w_arr, iters_arr


def chain_ols(w0, feats, labels, eta, noise=None, record=False):
    """Sequential one-sample steps on the squared-residual regression loss."""
    cdef const double[::1] w0_v = np.ascontiguousarray(w0, dtype=np.float64)
    cdef const double[:, ::1] x_v = feats
    cdef const double[::1] y_v = labels
    cdef const double[::1] eta_v = eta
    cdef const double[:, ::1] noise_v = noise if noise is not None else None
    cdef Py_ssize_t m = x_v.shape[0], d = x_v.shape[1]
    cdef bint keep = record
    cdef bint noisy = noise is not None

    w_arr = np.empty(d)
    acc_arr = np.zeros(d)
    nacc_arr = np.zeros(d)
    iters_arr = np.empty((m + 1, d)) if keep else None
    cdef double[::1] w = w_arr
    cdef double[::1] acc = acc_arr
    cdef double[::1] nacc = nacc_arr
    cdef double[:, ::1] iters = iters_arr if keep else None

    cdef Py_ssize_t t, j
    cdef double e, s, resid, tmp, u
    for j in range(d):
        w[j] = w0_v[j]
    if keep:
        for j in range(d):
            iters[0, j] = w[j]
    for t in range(m):
        e = eta_v[t]
        s = 0.0
        for j in range(d):
            s += w[j] * x_v[t, j]
        resid = s - y_v[t]
        tmp = 2.0 * resid
        for j in range(d):
            u = e * (tmp * x_v[t, j])
            acc[j] += u
        if noisy:
            for j in range(d):
                nacc[j] += noise_v[t, j]
                w[j] = (w0_v[j] - acc[j]) + nacc[j]
        else:
            for j in range(d):
                w[j] = w0_v[j] - acc[j]
        if keep:
            for j in range(d):
                iters[t + 1, j] = w[j]
    for j in range(d):
        if not isfinite(w[j]):
            raise NonFiniteIterateError(f"non-finite iterate at step {m}")
    return w_arr, iters_arr


def _flsgd(feats, labels, eta, w0, noise, keep_iterates, bint is_ols):
    cdef const double[:, :, ::1] z_v = feats
    cdef const double[:, ::1] y_v = labels if labels is not None else None
    cdef const double[:, ::1] eta_v = eta
    cdef const double[::1] w0_v = np.ascontiguousarray(w0, dtype=np.float64)
    cdef const double[:, :, ::1] noise_v = noise if noise is not None else None
    cdef Py_ssize_t K = z_v.shape[0], n = z_v.shape[1], d = z_v.shape[2]
    cdef Py_ssize_t R = eta_v.shape[0], tau = eta_v.shape[1]
    cdef bint keep = keep_iterates
    cdef bint noisy = noise is not None
    if n < R * tau:
        raise ValueError("dataset shorter than the schedule")

    aggs_arr = np.empty((R, d))
    iters_arr = np.empty((K, R, tau + 1, d)) if keep else None
    start_arr = np.empty(d)
    w_arr = np.empty(d)
    acc_arr = np.empty(d)
    nacc_arr = np.empty(d)
    aggsum_arr = np.empty(d)
    cdef double[:, ::1] aggs = aggs_arr
    cdef double[:, :, :, ::1] iters = iters_arr if keep else None
    cdef double[::1] start = start_arr
    cdef double[::1] w = w_arr
    cdef double[::1] acc = acc_arr
    cdef double[::1] nacc = nacc_arr
    cdef double[::1] aggsum = aggsum_arr

    cdef Py_ssize_t r, k, t, j, idx
    cdef double e, s, resid, tmp, u
    cdef double Kd = <double> K
    cdef bint ok
    for j in range(d):
        start[j] = w0_v[j]
    for r in range(R):
        for j in range(d):
            aggsum[j] = 0.0
        for k in range(K):
            for j in range(d):
                w[j] = start[j]
                acc[j] = 0.0
                nacc[j] = 0.0
            if keep:
                for j in range(d):
                    iters[k, r, 0, j] = start[j]
            for t in range(tau):
                idx = r * tau + t
                e = eta_v[r, t]
                if is_ols:
                    s = 0.0
                    for j in range(d):
                        s += w[j] * z_v[k, idx, j]
                    resid = s - y_v[k, idx]
                    tmp = 2.0 * resid
                    for j in range(d):
                        u = e * (tmp * z_v[k, idx, j])
                        acc[j] += u
                else:
                    for j in range(d):
                        u = e * (2.0 * (w[j] - z_v[k, idx, j]))
                        acc[j] += u
                if noisy:
                    for j in range(d):
                        nacc[j] += noise_v[k, idx, j]
                        w[j] = (start[j] - acc[j]) + nacc[j]
                else:
                    for j in range(d):
                        w[j] = start[j] - acc[j]
                if keep:
                    for j in range(d):
                        iters[k, r, t + 1, j] = w[j]
            ok = 1
            for j in range(d):
                if not isfinite(w[j]):
                    ok = 0
            if not ok:
                raise NonFiniteIterateError(
                    f"non-finite iterate for client {k + 1} in round {r + 1}"
                )
            for j in range(d):
                aggsum[j] += w[j]
        for j in range(d):
            start[j] = aggsum[j] / Kd
            aggs[r, j] = start[j]
    return aggs_arr, iters_arr


def flsgd_location(feats, eta, w0, noise=None, keep_iterates=False):
    """Full multi-round run on location data; returns round aggregates."""
    return _flsgd(feats, None, eta, w0, noise, keep_iterates, 0)


def flsgd_ols(feats, labels, eta, w0, noise=None, keep_iterates=False):
    """Full multi-round run on regression data; returns round aggregates."""
    return _flsgd(feats, labels, eta, w0, noise, keep_iterates, 1)
