"""Pure-Python SGD kernels, the fallback backend.

These mirror the compiled kernels in ``_kernels_c`` operation for operation:
same update expressions, same accumulation order, so both backends produce
bit-identical iterates.  Within each round the model is maintained as

    w_t = w_start - acc_t (+ noise_acc_t)

where ``acc_t`` is the running sum of the step updates (the round's
"innovation").  This makes the reconstruction identity
``w_end = w_start - innovation`` hold exactly, not just up to rounding.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteIterateError

BACKEND = "python"


def _quiet(fn):
    """Overflow inside a divergent chain is reported once, as the final check."""

    def wrapped(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped



def _check_finite(w: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(w)):
        raise NonFiniteIterateError(f"non-finite iterate at {where}")


@_quiet
def chain_location(w0, feats, eta, noise=None, record=False):
    """Sequential one-sample steps on the squared-distance location loss."""
    m, d = feats.shape
    w0 = np.asarray(w0, dtype=np.float64)
    w = w0.copy()
    acc = np.zeros(d)
    nacc = np.zeros(d) if noise is not None else None
    iters = np.empty((m + 1, d)) if record else None
    if record:
        iters[0] = w
    for t in range(m):
        acc += eta[t] * (2.0 * (w - feats[t]))
        if noise is not None:
            nacc += noise[t]
            w = (w0 - acc) + nacc
        else:
            w = w0 - acc
        if record:
            iters[t + 1] = w
    _check_finite(w, f"step {m}")
    return w, iters


@_quiet
def chain_ols(w0, feats, labels, eta, noise=None, record=False):
    """Sequential one-sample steps on the squared-residual regression loss."""
    m, d = feats.shape
    w0 = np.asarray(w0, dtype=np.float64)
    w = w0.copy()
    acc = np.zeros(d)
    nacc = np.zeros(d) if noise is not None else None
    iters = np.empty((m + 1, d)) if record else None
    if record:
        iters[0] = w
    for t in range(m):
        x = feats[t]
        s = 0.0
        for j in range(d):
            s += w[j] * x[j]
        resid = s - labels[t]
        acc += eta[t] * ((2.0 * resid) * x)
        if noise is not None:
            nacc += noise[t]
            w = (w0 - acc) + nacc
        else:
            w = w0 - acc
        if record:
            iters[t + 1] = w
    _check_finite(w, f"step {m}")
    return w, iters


def _flsgd(feats, labels, eta, w0, noise, keep_iterates):
    K, n, d = feats.shape
    R, tau = eta.shape
    if n < R * tau:
        raise ValueError("dataset shorter than the schedule")
    aggs = np.empty((R, d))
    iters = np.empty((K, R, tau + 1, d)) if keep_iterates else None
    start = np.array(w0, dtype=np.float64, copy=True)
    for r in range(R):
        aggsum = np.zeros(d)
        for k in range(K):
            w = start
            acc = np.zeros(d)
            nacc = np.zeros(d) if noise is not None else None
            if keep_iterates:
                iters[k, r, 0] = start
            for t in range(tau):
                idx = r * tau + t
                if labels is None:
                    acc += eta[r, t] * (2.0 * (w - feats[k, idx]))
                else:
                    x = feats[k, idx]
                    s = 0.0
                    for j in range(d):
                        s += w[j] * x[j]
                    resid = s - labels[k, idx]
                    acc += eta[r, t] * ((2.0 * resid) * x)
                if noise is not None:
                    nacc += noise[k, idx]
                    w = (start - acc) + nacc
                else:
                    w = start - acc
                if keep_iterates:
                    iters[k, r, t + 1] = w
            if not np.all(np.isfinite(w)):
                raise NonFiniteIterateError(
                    f"non-finite iterate for client {k + 1} in round {r + 1}"
                )
            aggsum += w
        start = aggsum / K
        aggs[r] = start
    return aggs, iters


@_quiet
def flsgd_location(feats, eta, w0, noise=None, keep_iterates=False):
    """Full multi-round run on location data; returns round aggregates."""
    return _flsgd(feats, None, eta, w0, noise, keep_iterates)


@_quiet
def flsgd_ols(feats, labels, eta, w0, noise=None, keep_iterates=False):
    """Full multi-round run on regression data; returns round aggregates."""
    return _flsgd(feats, labels, eta, w0, noise, keep_iterates)
