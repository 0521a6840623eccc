"""Monte-Carlo evaluation of the round-aware generalization upper bound.

The bound has two parts.  Term 1 averages, over rounds r and clients k, the
generalization error of a *modified* centralized SGD: the model trained on
the fixed round block S_{k,r} is averaged over redraws of all prior-round
data before being scored.  Term 2 charges the cross-round coupling: for every
replaced index i in rounds before the last, the product of the ghost
sample's potential-gradient norm and the leave-one-out divergence of the
round-end model, weighted by the schedule-dependent coefficient b_{r+1}.

Estimator layout: outer replicate m owns all random streams keyed by m, so
replicates can run in any order or in parallel; per-replicate totals are
reduced in replicate order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .core import RunConfig, Schedule
from .distributions import DataDistribution, check_family
from .engine import centralized_sgd_arrays, run_flsgd_arrays
from .errors import (
    IndexOutOfRangeError,
    NoisyRunUnsupportedError,
    VariantMismatchError,
    WrongRError,
)
from .losses import LossFamily, smoothness_constant
from .parallel import map_replicates
from .risks import MCEstimate, _mean_losses, mc_estimate
from .rng import derive_stream

A_PRIME_TRAINED = "trained"
A_PRIME_INIT = "init"


def b_coefficient(schedule: Schedule, r: int, L: float) -> float:
    """Tail coefficient b_{r+1}: rate-weighted (1 + L*eta) growth products.

    b_{r+1} = sum_{q=r+1}^{R} sum_{t=1}^{tau} eta[q,t] * prod_{h<t}(1 + L*eta[q,h]),
    with the empty product equal to 1 and b_{R+1} = 0.
    """
    if not 1 <= r <= schedule.R:
        raise IndexOutOfRangeError(f"round {r} outside 1..{schedule.R}")
    eta = schedule.eta
    total = 0.0
    for q in range(r + 1, schedule.R + 1):
        prod = 1.0
        for t in range(schedule.tau):
            total += eta[q - 1, t] * prod
            prod *= 1.0 + L * eta[q - 1, t]
    return total


@dataclass(frozen=True)
class ModifiedSgdSpec:
    """Which modified-SGD model to build: round r, client k, a fixed block."""

    r: int
    k: int
    m_inner: int
    block_features: np.ndarray
    block_labels: np.ndarray | None = None
    replicate: int = 0

    def __post_init__(self):
        if self.m_inner < 1:
            raise VariantMismatchError("m_inner must be at least 1")


def _ghost_grad_norm(family: LossFamily, feat_row: np.ndarray, label) -> float:
    if family.kind == "location":
        s = 0.0
        for v in feat_row:
            s += v * v
        return 2.0 * math.sqrt(s)
    return abs(2.0 * float(label))


def _modified_model(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    r: int,
    k: int,
    m_inner: int,
    block_feats: np.ndarray,
    block_labels,
    replicate: int,
    a_prime_r1: str,
) -> np.ndarray:
    schedule = config.schedule
    if r == 1:
        if a_prime_r1 == A_PRIME_INIT:
            return np.array(config.w0, copy=True)
        return centralized_sgd_arrays(
            config.w0, block_feats, block_labels, schedule.rates(1), family
        )
    tau, K = schedule.tau, config.K
    prior_n = (r - 1) * tau
    gen = derive_stream(config.seed, f"t1-prior/k{k}/r{r}", replicate).generator()
    feats, labels = mu.draw_arrays(gen, m_inner * K * prior_n)
    feats = feats.reshape(m_inner, K, prior_n, mu.dim)
    labels = labels.reshape(m_inner, K, prior_n) if labels is not None else None
    eta_prior = schedule.eta[: r - 1]
    eta_block = schedule.rates(r)
    total = np.zeros(config.dim)
    for j in range(m_inner):
        aggs, _ = run_flsgd_arrays(
            feats[j], labels[j] if labels is not None else None, eta_prior, config.w0
        )
        model = centralized_sgd_arrays(aggs[-1], block_feats, block_labels, eta_block, family)
        total += model
    return total / m_inner


def modified_sgd_model(
    spec: ModifiedSgdSpec,
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    a_prime_r1: str = A_PRIME_TRAINED,
) -> np.ndarray:
    """The averaged modified-SGD model for a fixed round block.

    Round 1 needs no prior data, so the result is the plain SGD output from
    w0 and m_inner is ignored.  For later rounds, each inner replicate
    redraws all prior-round data, runs rounds 1..r-1, and trains on the fixed
    block from the resulting aggregate; models are averaged coordinatewise in
    replicate order.
    """
    check_family(mu, family)
    if not 1 <= spec.r <= config.schedule.R:
        raise IndexOutOfRangeError(f"round {spec.r} outside 1..{config.schedule.R}")
    return _modified_model(
        config,
        mu,
        family,
        spec.r,
        spec.k,
        spec.m_inner,
        np.ascontiguousarray(spec.block_features, dtype=np.float64),
        spec.block_labels,
        spec.replicate,
        a_prime_r1,
    )


def _term1_replicate(config, mu, family, m_inner, n_test, a_prime_r1, m) -> np.ndarray:
    """gen(S_{k,r}, A'(r-1, S_{k,r})) for every (k, r), one outer draw each.

    The m_inner prior-round aggregates of round r are independent of every
    client's block, so one ensemble per (r, m) serves all K clients; each
    client still trains on its own fresh block.  This keeps every part
    unbiased while cutting the inner-loop cost by a factor of K.
    """
    schedule = config.schedule
    R, K, tau = schedule.R, config.K, schedule.tau
    test = None
    if mu.closed_form_risk(config.w0) is None:
        test = mu.test_arrays(derive_stream(config.seed, "t1-test", m).generator(), n_test)
    out = np.empty((K, R))
    for r in range(1, R + 1):
        starts = None
        if r > 1:
            prior_n = (r - 1) * tau
            gen = derive_stream(config.seed, f"t1-prior/r{r}", m).generator()
            feats, labels = mu.draw_arrays(gen, m_inner * K * prior_n)
            feats = feats.reshape(m_inner, K, prior_n, mu.dim)
            labels = labels.reshape(m_inner, K, prior_n) if labels is not None else None
            eta_prior = schedule.eta[: r - 1]
            starts = np.empty((m_inner, config.dim))
            for j in range(m_inner):
                aggs, _ = run_flsgd_arrays(
                    feats[j], labels[j] if labels is not None else None, eta_prior, config.w0
                )
                starts[j] = aggs[-1]
        eta_block = schedule.rates(r)
        for k in range(1, K + 1):
            gen = derive_stream(config.seed, f"t1-block/k{k}/r{r}", m).generator()
            block_feats, block_labels = mu.draw_arrays(gen, tau)
            if r == 1:
                if a_prime_r1 == A_PRIME_INIT:
                    model = np.array(config.w0, copy=True)
                else:
                    model = centralized_sgd_arrays(
                        config.w0, block_feats, block_labels, eta_block, family
                    )
            else:
                total = np.zeros(config.dim)
                for j in range(m_inner):
                    total += centralized_sgd_arrays(
                        starts[j], block_feats, block_labels, eta_block, family
                    )
                model = total / m_inner
            if test is None:
                pop = mu.closed_form_risk(model)
            else:
                pop = _mean_losses(family, test[0], test[1], model)
            emp = _mean_losses(family, block_feats, block_labels, model)
            out[k - 1, r - 1] = pop - emp
    return out


def _term1_worker(config, mu, family, m_inner, n_test, a_prime_r1, rng_range):
    return [
        _term1_replicate(config, mu, family, m_inner, n_test, a_prime_r1, m)
        for m in rng_range
    ]


def term1_estimate(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    m_outer: int,
    m_inner: int,
    n_test: int = 1000,
    a_prime_r1: str = A_PRIME_TRAINED,
    threads: int = 1,
) -> tuple[MCEstimate, dict[tuple[int, int], MCEstimate]]:
    """First bound term with prefactor 1/(R K^2), plus raw per-(k, r) parts."""
    check_family(mu, family)
    R, K = config.schedule.R, config.K
    worker = partial(_term1_worker, config, mu, family, m_inner, n_test, a_prime_r1)
    tables = map_replicates(worker, m_outer, threads)
    parts = {
        (k, r): mc_estimate([tab[k - 1, r - 1] for tab in tables])
        for k in range(1, K + 1)
        for r in range(1, R + 1)
    }
    pref = 1.0 / (R * K * K)
    totals = []
    for tab in tables:
        s = 0.0
        for k in range(K):
            for r in range(R):
                s += tab[k, r]
        totals.append(pref * s)
    return mc_estimate(totals), parts


def _term2_replicate(config, mu, family, b_coeffs, L, full_sum, m):
    """Raw per-(k, r) coupling sums (full) or per-r sampled estimates."""
    schedule = config.schedule
    R, K, tau, n = schedule.R, config.K, schedule.tau, config.n
    gen = derive_stream(config.seed, "t2-data", m).generator()
    feats, labels = mu.draw_arrays(gen, K * n)
    feats = np.ascontiguousarray(feats.reshape(K, n, mu.dim))
    labels = labels.reshape(K, n) if labels is not None else None
    aggs, iters = run_flsgd_arrays(feats, labels, schedule.eta, config.w0, None, True)

    ghost_gen = derive_stream(config.seed, "t2-ghost", m).generator()
    eta = schedule.eta
    w0 = config.w0

    def replaced_end(k, r, pos, ghost_feat, ghost_label):
        lo = (r - 1) * tau
        bf = np.array(feats[k - 1, lo : lo + tau], copy=True)
        bf[pos] = ghost_feat
        bl = None
        if labels is not None:
            bl = np.array(labels[k - 1, lo : lo + tau], copy=True)
            bl[pos] = ghost_label
        start = w0 if r == 1 else aggs[r - 2]
        return centralized_sgd_arrays(start, bf, bl, eta[r - 1], family)

    if full_sum:
        gfeats, glabels = mu.draw_arrays(ghost_gen, K * (R - 1) * tau)
        gfeats = gfeats.reshape(K, (R - 1) * tau, mu.dim)
        glabels = glabels.reshape(K, (R - 1) * tau) if glabels is not None else None
        table = np.zeros((K, R - 1))
        for r in range(1, R):
            lo = (r - 1) * tau
            for k in range(1, K + 1):
                s = 0.0
                for pos in range(tau):
                    gf = gfeats[k - 1, lo + pos]
                    gl = glabels[k - 1, lo + pos] if glabels is not None else None
                    w_rep = replaced_end(k, r, pos, gf, gl)
                    diff = w_rep - iters[k - 1, r - 1, tau]
                    s += _ghost_grad_norm(family, gf, gl) * math.sqrt(float(np.dot(diff, diff)))
                table[k - 1, r - 1] = s
        return table

    pick_gen = derive_stream(config.seed, "t2-pick", m).generator()
    est = np.zeros(R - 1)
    for r in range(1, R):
        k = int(pick_gen.integers(1, K + 1))
        pos = int(pick_gen.integers(0, tau))
        gf, gl = mu.draw_arrays(ghost_gen, 1)
        gf = gf[0]
        gl = gl[0] if gl is not None else None
        w_rep = replaced_end(k, r, pos, gf, gl)
        diff = w_rep - iters[k - 1, r - 1, tau]
        val = _ghost_grad_norm(family, gf, gl) * math.sqrt(float(np.dot(diff, diff)))
        est[r - 1] = tau * K * val
    return est


def _term2_worker(config, mu, family, b_coeffs, L, full_sum, rng_range):
    return [
        _term2_replicate(config, mu, family, b_coeffs, L, full_sum, m) for m in rng_range
    ]


def term2_estimate(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    replicates: int,
    full_sum: bool = False,
    threads: int = 1,
    L: float | None = None,
) -> tuple[MCEstimate, dict[int, MCEstimate], dict[tuple[int, int], MCEstimate] | None]:
    """Second bound term with its L*b_{r+1}/(n K^2) prefactors applied.

    Returns (total, raw per-round parts, raw per-(k, r) parts).  The default
    estimator samples one uniformly random (k, i) pair per round and
    replicate and scales by tau*K, so per-(k, r) parts exist only in
    ``full_sum`` mode.
    """
    check_family(mu, family)
    schedule = config.schedule
    R, K, n = schedule.R, config.K, config.n
    if L is None:
        L = smoothness_constant(family, config.smoothness)
    if R == 1:
        return MCEstimate(0.0, 0.0, replicates), {}, ({} if full_sum else None)
    b_coeffs = {r: b_coefficient(schedule, r, L) for r in range(1, R)}
    worker = partial(_term2_worker, config, mu, family, b_coeffs, L, full_sum)
    tables = map_replicates(worker, replicates, threads)

    prefs = {r: L * b_coeffs[r] / (n * K * K) for r in range(1, R)}
    round_parts: dict[int, MCEstimate] = {}
    kr_parts: dict[tuple[int, int], MCEstimate] | None = {} if full_sum else None
    totals = []
    if full_sum:
        for r in range(1, R):
            for k in range(1, K + 1):
                kr_parts[(k, r)] = mc_estimate([tab[k - 1, r - 1] for tab in tables])
            round_parts[r] = mc_estimate(
                [_row_sum(tab[:, r - 1]) for tab in tables]
            )
        for tab in tables:
            s = 0.0
            for r in range(1, R):
                s += prefs[r] * _row_sum(tab[:, r - 1])
            totals.append(s)
    else:
        for r in range(1, R):
            round_parts[r] = mc_estimate([tab[r - 1] for tab in tables])
        for tab in tables:
            s = 0.0
            for r in range(1, R):
                s += prefs[r] * tab[r - 1]
            totals.append(s)
    return mc_estimate(totals), round_parts, kr_parts


def _row_sum(values) -> float:
    s = 0.0
    for v in values:
        s += float(v)
    return s


@dataclass(frozen=True)
class BoundBreakdown:
    """All pieces of the evaluated bound, recomposable into the total."""

    term1_parts: dict[tuple[int, int], MCEstimate]
    term2_round_parts: dict[int, MCEstimate]
    term2_kr_parts: dict[tuple[int, int], MCEstimate] | None
    b_coefficients: dict[int, float]  # maps r+1 -> b_{r+1}, r = 1..R
    term1_total: MCEstimate
    term2_total: MCEstimate
    total: MCEstimate
    L: float

    def recomputed_total(self, config: RunConfig) -> float:
        """Reassemble the total mean from the raw parts and prefactors."""
        R, K, n = config.schedule.R, config.K, config.n
        t1 = 0.0
        for est in self.term1_parts.values():
            t1 += est.mean
        total = t1 / (R * K * K)
        for r, est in self.term2_round_parts.items():
            total += self.L * self.b_coefficients[r + 1] / (n * K * K) * est.mean
        return total


def theorem_bound(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    m_outer: int,
    m_inner: int,
    m2: int,
    n_test: int = 1000,
    full_term2: bool = False,
    a_prime_r1: str = A_PRIME_TRAINED,
    threads: int = 1,
) -> BoundBreakdown:
    """Evaluate the full upper bound; rejects noisy-update configs."""
    if config.noise_sigma > 0.0:
        raise NoisyRunUnsupportedError("the bound assumes noiseless local updates")
    L = smoothness_constant(family, config.smoothness)
    schedule = config.schedule
    b_coeffs = {r + 1: b_coefficient(schedule, r, L) for r in range(1, schedule.R + 1)}
    t1_total, t1_parts = term1_estimate(
        config, mu, family, m_outer, m_inner, n_test, a_prime_r1, threads
    )
    t2_total, t2_round, t2_kr = term2_estimate(
        config, mu, family, m2, full_term2, threads, L
    )
    return BoundBreakdown(
        t1_parts, t2_round, t2_kr, b_coeffs, t1_total, t2_total, t1_total + t2_total, L
    )


def one_shot_rhs(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    replicates: int,
    n_test: int = 1000,
    a_prime_r1: str = A_PRIME_TRAINED,
    threads: int = 1,
) -> MCEstimate:
    """The one-shot (R = 1) identity's right-hand side.

    Each client is trained alone for its n steps and scored on its own
    dataset; the prefactor 1/K^2 matches the bound's first term at R = 1, and
    the streams are shared with it, so the two agree bit for bit.
    """
    if config.schedule.R != 1:
        raise WrongRError(f"one-shot identity needs R = 1, got R = {config.schedule.R}")
    total, _ = term1_estimate(
        config, mu, family, replicates, 1, n_test, a_prime_r1, threads
    )
    return total
