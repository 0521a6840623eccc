"""Exact verification of the bound's building blocks on finite-support data.

Every expectation is computed as a probability-weighted sum over all
realizations of the relevant samples, so the decomposition identities, the
one-shot equality, the per-index coupling inequality and the full bound can
be checked with no Monte-Carlo error.  Verification uses the location family
(the setting in which the identities are exact); realization spaces are
capped by a size guard.

Innovations inside the checks are reconstructed from round boundaries
(round start minus round end), which the engine's accumulator update makes
exact; the public ``innovation`` operation recomputes the weighted gradient
sum from stored iterates instead.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .bound import b_coefficient
from .core import FederatedDataset, Schedule
from .distributions import FiniteDistribution
from .engine import Trajectory
from .errors import (
    IndexOutOfRangeError,
    RetentionInsufficientError,
    TooLargeError,
    WrongShapeError,
)
from .losses import LossFamily

ENUM_GUARD = 10**6
IDENTITY_TOL = 1e-10

IDENTITY_CHECKS = (
    "leave_one_out",
    "decomp_r2",
    "term_a",
    "term_b2",
    "corollary_one_shot",
    "cq_zero",
)
INEQUALITY_CHECKS = ("term_b1", "theorem")


@dataclass(frozen=True)
class OracleReport:
    """Both sides of one checked statement."""

    name: str
    kind: str  # "identity" or "inequality"
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def passed(self, tol: float = IDENTITY_TOL) -> bool:
        if self.kind == "identity":
            return abs(self.lhs - self.rhs) <= tol
        return self.slack >= -tol


@dataclass(frozen=True)
class OracleSetup:
    """A small finite-support instance: distribution, shape and schedule."""

    dist: FiniteDistribution
    K: int
    schedule: Schedule
    w0: np.ndarray
    L: float = 2.0
    aggregate_perturbation: float = 0.0  # test hook; breaks the mean aggregation

    def __post_init__(self):
        if self.dist.kind != "location":
            raise WrongShapeError("the oracle verifies the location family only")
        object.__setattr__(
            self, "w0", np.ascontiguousarray(np.atleast_1d(self.w0), dtype=np.float64)
        )
        if self.w0.shape[0] != self.dist.dim:
            raise WrongShapeError("w0 dimension must match the support dimension")

    @property
    def n(self) -> int:
        return self.schedule.n

    @property
    def R(self) -> int:
        return self.schedule.R

    @property
    def tau(self) -> int:
        return self.schedule.tau

    @property
    def points(self) -> np.ndarray:
        return self.dist.feature_matrix()

    @property
    def probs(self) -> np.ndarray:
        return np.asarray(self.dist.probs)


def _guard(support: int, count: int) -> None:
    if support**count > ENUM_GUARD:
        raise TooLargeError(
            f"{support}^{count} realizations exceed the {ENUM_GUARD} guard"
        )


def _iter_idx(support: int, count: int):
    return itertools.product(range(support), repeat=count)


def _prob_of(probs: np.ndarray, idx: tuple[int, ...]) -> float:
    p = 1.0
    for i in idx:
        p *= probs[i]
    return p


def _pop_risk(points: np.ndarray, probs: np.ndarray, w: np.ndarray) -> float:
    total = 0.0
    for s in range(points.shape[0]):
        diff = w - points[s]
        total += probs[s] * float(np.dot(diff, diff))
    return total


def _mean_loss(w: np.ndarray, feats: np.ndarray) -> float:
    total = 0.0
    for t in range(feats.shape[0]):
        diff = w - feats[t]
        total += float(np.dot(diff, diff))
    return total / feats.shape[0]


def _chain(w0: np.ndarray, feats: np.ndarray, eta_row: np.ndarray) -> np.ndarray:
    w, _ = kernels.chain_location(w0, feats, eta_row)
    return w


def _gen(setup: OracleSetup, feats_flat: np.ndarray, w: np.ndarray) -> float:
    return _pop_risk(setup.points, setup.probs, w) - _mean_loss(w, feats_flat)


def _seq_mean(models: list[np.ndarray]) -> np.ndarray:
    total = models[0].copy()
    for m in models[1:]:
        total += m
    return total / len(models)


def _perturbed_mean(setup: OracleSetup, models: list[np.ndarray]) -> np.ndarray:
    agg = _seq_mean(models)
    if setup.aggregate_perturbation != 0.0:
        agg = agg + setup.aggregate_perturbation * models[0]
    return agg


def enumerate_expectation(
    dist: FiniteDistribution,
    n: int,
    K: int,
    functional: Callable,
    with_ghosts: bool = False,
) -> float:
    """Exact expectation of `functional` over all dataset realizations.

    The functional receives a FederatedDataset (and, with ghosts, a second
    one holding the i.i.d. copies), and realizations are accumulated in
    lexicographic order.
    """
    count = n * K * (2 if with_ghosts else 1)
    _guard(dist.size, count)
    points = dist.feature_matrix()
    labels = dist.label_vector()
    probs = np.asarray(dist.probs)
    d = dist.dim
    total = 0.0
    for idx in _iter_idx(dist.size, count):
        p = _prob_of(probs, idx)
        sel = np.array(idx)
        feats = points[sel[: n * K]].reshape(K, n, d)
        labs = labels[sel[: n * K]].reshape(K, n) if labels is not None else None
        data = FederatedDataset.from_arrays(feats, labs)
        if with_ghosts:
            gfeats = points[sel[n * K :]].reshape(K, n, d)
            glabs = labels[sel[n * K :]].reshape(K, n) if labels is not None else None
            ghost = FederatedDataset.from_arrays(gfeats, glabs)
            total += p * float(functional(data, ghost))
        else:
            total += p * float(functional(data))
    return total


def innovation(
    traj: Trajectory,
    u: int,
    q: int,
    schedule: Schedule,
    family: LossFamily,
    data: FederatedDataset,
) -> np.ndarray:
    """Client u's rate-weighted gradient sum over round q.

    Satisfies round_start - innovation == round_end exactly for noiseless
    runs (the engine maintains iterates through this very accumulator).
    """
    if traj.iterates is None:
        raise RetentionInsufficientError("innovation needs full iterate retention")
    if not 1 <= q <= schedule.R:
        raise IndexOutOfRangeError(f"round {q} outside 1..{schedule.R}")
    tau = schedule.tau
    lo = (q - 1) * tau
    V = np.zeros(traj.w0.shape[0])
    for t in range(1, tau + 1):
        w_prev = traj.iterate(u, q, t - 1)
        if family.kind == "location":
            grad_term = schedule.eta[q - 1, t - 1] * (
                2.0 * (w_prev - data.features[u - 1, lo + t - 1])
            )
        else:
            x = data.features[u - 1, lo + t - 1]
            resid = float(np.dot(w_prev, x)) - data.labels[u - 1, lo + t - 1]
            grad_term = schedule.eta[q - 1, t - 1] * ((2.0 * resid) * x)
        V += grad_term
    return V


# ---------------------------------------------------------------------------
# identity checks


def _check_leave_one_out(setup: OracleSetup) -> OracleReport:
    """Replace-one expansion for plain SGD on a single dataset of size n."""
    m = setup.n
    S = setup.dist.size
    _guard(S, m + 1)
    points, probs = setup.points, setup.probs
    eta_flat = setup.schedule.flat()

    lhs = 0.0
    for idx in _iter_idx(S, m):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)]
        w = _chain(setup.w0, feats, eta_flat)
        lhs += p * _gen(setup, feats, w)

    rhs = 0.0
    for i in range(m):
        for idx in _iter_idx(S, m + 1):
            p = _prob_of(probs, idx)
            feats = points[np.array(idx[:m])]
            ghost = points[idx[m]]
            w_base = _chain(setup.w0, feats, eta_flat)
            feats_rep = feats.copy()
            feats_rep[i] = ghost
            w_rep = _chain(setup.w0, feats_rep, eta_flat)
            db = ghost - w_base
            dr = ghost - w_rep
            rhs += p * (float(np.dot(db, db)) - float(np.dot(dr, dr)))
    rhs /= m
    return OracleReport("leave_one_out", "identity", lhs, rhs)


def _corollary_lhs(setup: OracleSetup) -> float:
    """E[gen(S, aggregate)] for R = 1, honoring the aggregation test hook."""
    K, n, S = setup.K, setup.n, setup.dist.size
    _guard(S, n * K)
    points, probs = setup.points, setup.probs
    eta_flat = setup.schedule.flat()
    d = setup.dist.dim
    lhs = 0.0
    for idx in _iter_idx(S, n * K):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)].reshape(K, n, d)
        models = [_chain(setup.w0, feats[k], eta_flat) for k in range(K)]
        agg = _perturbed_mean(setup, models)
        lhs += p * _gen(setup, feats.reshape(-1, d), agg)
    return lhs


def _check_corollary_one_shot(setup: OracleSetup) -> OracleReport:
    if setup.R != 1:
        raise WrongShapeError("corollary_one_shot needs R = 1")
    K, n, S = setup.K, setup.n, setup.dist.size
    points, probs = setup.points, setup.probs
    eta_flat = setup.schedule.flat()

    lhs = _corollary_lhs(setup)

    per_client = 0.0
    for idx in _iter_idx(S, n):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)]
        w = _chain(setup.w0, feats, eta_flat)
        per_client += p * _gen(setup, feats, w)
    rhs = K * per_client / (K * K)
    return OracleReport("corollary_one_shot", "identity", lhs, rhs)


def _check_term_a(setup: OracleSetup) -> OracleReport:
    """First-round replace-one inner products vs. the block generalization.

    Checked through the local model difference; the aggregate difference is
    that divided by K (only one client's round-1 model reacts).
    """
    if setup.R != 2:
        raise WrongShapeError("term_a needs R = 2")
    tau, S = setup.tau, setup.dist.size
    _guard(S, tau + 1)
    points, probs = setup.points, setup.probs
    eta1 = setup.schedule.rates(1)

    rhs = 0.0
    for idx in _iter_idx(S, tau):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)]
        w = _chain(setup.w0, feats, eta1)
        rhs += p * _gen(setup, feats, w)

    lhs = 0.0
    for i in range(tau):
        for idx in _iter_idx(S, tau + 1):
            p = _prob_of(probs, idx)
            feats = points[np.array(idx[:tau])]
            ghost = points[idx[tau]]
            w_base = _chain(setup.w0, feats, eta1)
            feats_rep = feats.copy()
            feats_rep[i] = ghost
            w_rep = _chain(setup.w0, feats_rep, eta1)
            lhs += p * float(np.dot(2.0 * ghost, w_rep - w_base))
    lhs /= tau
    return OracleReport("term_a", "identity", lhs, rhs)


def _round1_aggregate(setup: OracleSetup, prior_feats: np.ndarray) -> np.ndarray:
    """Mean of the K round-1 models trained on (K, tau, d) prior data."""
    eta1 = setup.schedule.rates(1)
    models = [_chain(setup.w0, prior_feats[k], eta1) for k in range(setup.K)]
    return _seq_mean(models)


def _check_term_b2(setup: OracleSetup) -> OracleReport:
    """Second-round replace-one inner products vs. the modified-SGD block gen."""
    if setup.R != 2:
        raise WrongShapeError("term_b2 needs R = 2")
    K, tau, S = setup.K, setup.tau, setup.dist.size
    _guard(S, tau * K + tau + 1)
    points, probs = setup.points, setup.probs
    eta2 = setup.schedule.rates(2)
    d = setup.dist.dim

    # rhs: enumerate the fixed block; A' averages over all prior-round data.
    rhs = 0.0
    for bidx in _iter_idx(S, tau):
        pb = _prob_of(probs, bidx)
        block = points[np.array(bidx)]
        a_prime = np.zeros(d)
        for pidx in _iter_idx(S, tau * K):
            pp = _prob_of(probs, pidx)
            prior = points[np.array(pidx)].reshape(K, tau, d)
            agg1 = _round1_aggregate(setup, prior)
            a_prime += pp * _chain(agg1, block, eta2)
        rhs += pb * _gen(setup, block, a_prime)

    # lhs: (1/tau) sum_i E <2 ghost, V - V_rep> for replaced round-2 indices.
    lhs = 0.0
    for i in range(tau):
        for pidx in _iter_idx(S, tau * K):
            pp = _prob_of(probs, pidx)
            prior = points[np.array(pidx)].reshape(K, tau, d)
            agg1 = _round1_aggregate(setup, prior)
            for bidx in _iter_idx(S, tau):
                pb = _prob_of(probs, bidx)
                block = points[np.array(bidx)]
                w_end = _chain(agg1, block, eta2)
                for gi in range(S):
                    pg = probs[gi]
                    ghost = points[gi]
                    block_rep = block.copy()
                    block_rep[i] = ghost
                    w_end_rep = _chain(agg1, block_rep, eta2)
                    # V - V_rep = (agg1 - w_end) - (agg1 - w_end_rep)
                    v_diff = w_end_rep - w_end
                    lhs += pp * pb * pg * float(np.dot(2.0 * ghost, v_diff))
    lhs /= tau
    return OracleReport("term_b2", "identity", lhs, rhs)


def _full_run(setup: OracleSetup, feats: np.ndarray):
    return kernels.flsgd_location(feats, setup.schedule.eta, setup.w0, None, True)


def _coupling_sum_round2(
    setup: OracleSetup,
    feats: np.ndarray,
    aggs,
    iters,
    k: int,
    i: int,
    ghost: np.ndarray,
) -> float:
    """sum_j <2 ghost, V_j^(2) - V'_j^(2)> for a round-1 replacement (k, i)."""
    K, tau, d = setup.K, setup.tau, setup.dist.dim
    feats_rep = feats.copy()
    feats_rep[k, i] = ghost
    aggs_rep, iters_rep = _full_run(setup, feats_rep)
    total = 0.0
    g2 = 2.0 * ghost
    for j in range(K):
        v_base = aggs[0] - iters[j, 1, tau]
        v_rep = aggs_rep[0] - iters_rep[j, 1, tau]
        total += float(np.dot(g2, v_base - v_rep))
    return total


def _check_decomp_r2(setup: OracleSetup) -> OracleReport:
    """Two-round decomposition: E[gen] = first-round term + coupling term."""
    if setup.R != 2:
        raise WrongShapeError("decomp_r2 needs R = 2")
    K, n, tau, S = setup.K, setup.n, setup.tau, setup.dist.size
    _guard(S, n * K + 1)
    points, probs = setup.points, setup.probs
    d = setup.dist.dim
    eta1 = setup.schedule.rates(1)
    eta2 = setup.schedule.rates(2)

    lhs = 0.0
    term_a = 0.0
    term_b = 0.0
    for idx in _iter_idx(S, n * K):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)].reshape(K, n, d)
        aggs, iters = _full_run(setup, feats)
        lhs += p * _gen(setup, feats.reshape(-1, d), aggs[1])

        # A: first-round aggregate shifts, via the literal aggregate difference.
        for k in range(K):
            for i in range(tau):
                for gi in range(S):
                    ghost = points[gi]
                    block_rep = feats[k, :tau].copy()
                    block_rep[i] = ghost
                    w_rep = _chain(setup.w0, block_rep, eta1)
                    models = [iters[j, 0, tau].copy() for j in range(K)]
                    base_agg = _seq_mean(models)
                    models[k] = w_rep
                    rep_agg = _seq_mean(models)
                    term_a += (
                        p * probs[gi] * float(np.dot(2.0 * ghost, rep_agg - base_agg))
                    )

        # B, replaced index in round 1: every client's round-2 path reacts.
        for k in range(K):
            for i in range(tau):
                for gi in range(S):
                    val = _coupling_sum_round2(setup, feats, aggs, iters, k, i, points[gi])
                    term_b += p * probs[gi] * val

        # B, replaced index in round 2: only client k's own path reacts.
        for k in range(K):
            for i in range(tau):
                block = feats[k, tau : 2 * tau]
                w_end = iters[k, 1, tau]
                for gi in range(S):
                    ghost = points[gi]
                    block_rep = block.copy()
                    block_rep[i] = ghost
                    w_end_rep = _chain(aggs[0], block_rep, eta2)
                    v_diff_neg = w_end_rep - w_end  # = V - V_rep
                    term_b += p * probs[gi] * float(np.dot(2.0 * ghost, v_diff_neg))

    rhs = term_a / (n * K) + term_b / (n * K * K)
    return OracleReport("decomp_r2", "identity", lhs, rhs)


def _check_cq_zero(setup: OracleSetup) -> OracleReport:
    """Innovations of rounds before the replaced index's round never move."""
    if setup.R < 3:
        raise WrongShapeError("cq_zero needs R >= 3 (q < r requires q >= 2)")
    K, n, tau, S, R = setup.K, setup.n, setup.tau, setup.dist.size, setup.R
    _guard(S, n * K + 1)
    points, probs = setup.points, setup.probs
    d = setup.dist.dim

    lhs = 0.0
    for idx in _iter_idx(S, n * K):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)].reshape(K, n, d)
        aggs, iters = _full_run(setup, feats)
        for r in range(3, R + 1):
            for k in range(K):
                for i in range((r - 1) * tau, r * tau):
                    for gi in range(S):
                        ghost = points[gi]
                        feats_rep = feats.copy()
                        feats_rep[k, i] = ghost
                        aggs_rep, iters_rep = _full_run(setup, feats_rep)
                        g2 = 2.0 * ghost
                        for q in range(2, r):
                            start = aggs[q - 2]
                            start_rep = aggs_rep[q - 2]
                            for j in range(K):
                                v_base = start - iters[j, q - 1, tau]
                                v_rep = start_rep - iters_rep[j, q - 1, tau]
                                lhs += p * probs[gi] * float(np.dot(g2, v_base - v_rep))
    return OracleReport("cq_zero", "identity", lhs, 0.0)


def check_identity(which: str, setup: OracleSetup) -> OracleReport:
    """Compute both sides of the named identity by exact enumeration."""
    if which == "leave_one_out":
        return _check_leave_one_out(setup)
    if which == "corollary_one_shot":
        return _check_corollary_one_shot(setup)
    if which == "term_a":
        return _check_term_a(setup)
    if which == "term_b2":
        return _check_term_b2(setup)
    if which == "decomp_r2":
        return _check_decomp_r2(setup)
    if which == "cq_zero":
        return _check_cq_zero(setup)
    raise WrongShapeError(f"unknown identity check {which!r}")


# ---------------------------------------------------------------------------
# inequality checks


def _check_term_b1(setup: OracleSetup) -> OracleReport:
    """Coupling inner products vs. L b_2 times the leave-one-out divergence.

    Holds for every (k, i); client symmetry makes the value k-independent, so
    the worst slack over the replaced positions i is reported.
    """
    if setup.R != 2:
        raise WrongShapeError("term_b1 needs R = 2")
    K, n, tau, S = setup.K, setup.n, setup.tau, setup.dist.size
    _guard(S, n * K + 1)
    points, probs = setup.points, setup.probs
    d = setup.dist.dim
    eta1 = setup.schedule.rates(1)
    b2 = b_coefficient(setup.schedule, 1, setup.L)

    worst: OracleReport | None = None
    for i in range(tau):
        lhs = 0.0
        for idx in _iter_idx(S, n * K):
            p = _prob_of(probs, idx)
            feats = points[np.array(idx)].reshape(K, n, d)
            aggs, iters = _full_run(setup, feats)
            for gi in range(S):
                val = _coupling_sum_round2(setup, feats, aggs, iters, 0, i, points[gi])
                lhs += p * probs[gi] * val

        rhs = 0.0
        for idx in _iter_idx(S, tau):
            p = _prob_of(probs, idx)
            block = points[np.array(idx)]
            w_base = _chain(setup.w0, block, eta1)
            for gi in range(S):
                ghost = points[gi]
                block_rep = block.copy()
                block_rep[i] = ghost
                w_rep = _chain(setup.w0, block_rep, eta1)
                diff = w_rep - w_base
                gnorm = 2.0 * math.sqrt(float(np.dot(ghost, ghost)))
                rhs += p * probs[gi] * gnorm * math.sqrt(float(np.dot(diff, diff)))
        rhs *= setup.L * b2
        report = OracleReport("term_b1", "inequality", lhs, rhs)
        if worst is None or report.slack < worst.slack:
            worst = report
    return worst


def exact_modified_model(setup: OracleSetup, r: int, block: np.ndarray) -> np.ndarray:
    """A'(r-1, block): prior-round data averaged out by exact enumeration."""
    if r == 1:
        return _chain(setup.w0, block, setup.schedule.rates(1))
    K, tau, S = setup.K, setup.tau, setup.dist.size
    points, probs = setup.points, setup.probs
    d = setup.dist.dim
    prior_n = (r - 1) * tau
    _guard(S, prior_n * K)
    eta_prior = setup.schedule.eta[: r - 1]
    model = np.zeros(d)
    for pidx in _iter_idx(S, prior_n * K):
        pp = _prob_of(probs, pidx)
        prior = np.ascontiguousarray(points[np.array(pidx)].reshape(K, prior_n, d))
        aggs, _ = kernels.flsgd_location(prior, eta_prior, setup.w0, None, False)
        model += pp * _chain(aggs[-1], block, setup.schedule.rates(r))
    return model


def exact_term1(setup: OracleSetup) -> float:
    """First bound term, exactly: (1/(R K^2)) sum_{r,k} E[gen(block, A')]."""
    K, tau, S, R = setup.K, setup.tau, setup.dist.size, setup.R
    points, probs = setup.points, setup.probs
    total = 0.0
    for r in range(1, R + 1):
        value_r = 0.0
        for bidx in _iter_idx(S, tau):
            pb = _prob_of(probs, bidx)
            block = points[np.array(bidx)]
            a_prime = exact_modified_model(setup, r, block)
            value_r += pb * _gen(setup, block, a_prime)
        total += K * value_r  # identical for every client
    return total / (R * K * K)


def exact_term2(setup: OracleSetup) -> float:
    """Second bound term, exactly, with its L b_{r+1}/(n K^2) prefactors."""
    K, n, tau, S, R = setup.K, setup.n, setup.tau, setup.dist.size, setup.R
    points, probs = setup.points, setup.probs
    d = setup.dist.dim
    total = 0.0
    for r in range(1, R):
        _guard(S, r * tau * K + 1)
        b_next = b_coefficient(setup.schedule, r, setup.L)
        pref = setup.L * b_next / (n * K * K)
        eta_pre = setup.schedule.eta[:r]
        sum_ik = 0.0
        for i in range((r - 1) * tau, r * tau):
            value = 0.0
            for idx in _iter_idx(S, r * tau * K):
                p = _prob_of(probs, idx)
                feats = np.ascontiguousarray(
                    points[np.array(idx)].reshape(K, r * tau, d)
                )
                aggs, iters = kernels.flsgd_location(feats, eta_pre, setup.w0, None, True)
                w_end = iters[0, r - 1, tau]
                start = setup.w0 if r == 1 else aggs[r - 2]
                block_rep = feats[0, (r - 1) * tau : r * tau].copy()
                for gi in range(S):
                    ghost = points[gi]
                    block_rep[i - (r - 1) * tau] = ghost
                    w_rep = _chain(start, block_rep, setup.schedule.rates(r))
                    diff = w_rep - w_end
                    gnorm = 2.0 * math.sqrt(float(np.dot(ghost, ghost)))
                    value += (
                        p * probs[gi] * gnorm * math.sqrt(float(np.dot(diff, diff)))
                    )
            sum_ik += K * value  # identical for every client
        total += pref * sum_ik
    return total


def exact_expected_gen(setup: OracleSetup) -> float:
    """E[gen(S, final aggregate)] by full dataset enumeration."""
    K, n, S = setup.K, setup.n, setup.dist.size
    _guard(S, n * K)
    points, probs = setup.points, setup.probs
    d = setup.dist.dim
    total = 0.0
    for idx in _iter_idx(S, n * K):
        p = _prob_of(probs, idx)
        feats = points[np.array(idx)].reshape(K, n, d)
        aggs, _ = kernels.flsgd_location(feats, setup.schedule.eta, setup.w0, None, False)
        total += p * _gen(setup, feats.reshape(-1, d), aggs[-1])
    return total


def _check_theorem(setup: OracleSetup) -> OracleReport:
    lhs = exact_expected_gen(setup)
    rhs = exact_term1(setup) + exact_term2(setup)
    return OracleReport("theorem", "inequality", lhs, rhs)


def check_inequality(which: str, setup: OracleSetup) -> OracleReport:
    """Compute both sides of the named inequality by exact enumeration."""
    if which == "term_b1":
        return _check_term_b1(setup)
    if which == "theorem":
        return _check_theorem(setup)
    raise WrongShapeError(f"unknown inequality check {which!r}")
