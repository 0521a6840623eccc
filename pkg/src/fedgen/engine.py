"""Deterministic FL-SGD execution, trajectories and leave-one-out replays.

One run works through R rounds; in each round every client takes tau = n/R
one-sample gradient steps from the previous round's aggregate, and the server
averages the round-end models.  With ``noise_sigma = 0`` a trajectory is a
pure function of (dataset, config); two runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    FederatedDataset,
    Replacement,
    RoundBlock,
    RunConfig,
    Sample,
    Schedule,
    apply_replacement,
)
from .errors import (
    DimensionMismatchError,
    EmptyListError,
    IndexOutOfRangeError,
    RetentionInsufficientError,
    VariantMismatchError,
)
from .losses import LossFamily, get_family
from .rng import RngStream, derive_stream

RETAIN_FULL = "full"
RETAIN_AGGREGATES = "aggregates"


@dataclass(frozen=True)
class Trajectory:
    """All iterates of one FL-SGD run (or just the per-round aggregates)."""

    aggregates: np.ndarray  # (R, p)
    iterates: np.ndarray | None  # (K, R, tau + 1, p) when retention is full
    retention: str
    schedule: Schedule
    w0: np.ndarray
    noise: np.ndarray | None = None  # realized noise draws, (K, n, p)

    @property
    def R(self) -> int:
        return self.aggregates.shape[0]

    @property
    def final(self) -> np.ndarray:
        """The output hypothesis: the last round's aggregate."""
        return self.aggregates[-1]

    def aggregate_of(self, r: int) -> np.ndarray:
        """Server aggregate after round r (1-based); r = 0 gives w0."""
        if r == 0:
            return self.w0
        if not 1 <= r <= self.R:
            raise IndexOutOfRangeError(f"round {r} outside 0..{self.R}")
        return self.aggregates[r - 1]

    def iterate(self, k: int, r: int, t: int) -> np.ndarray:
        """Client k's model after step t of round r (t = 0 is the round start)."""
        if self.iterates is None:
            raise RetentionInsufficientError("trajectory retains aggregates only")
        return self.iterates[k - 1, r - 1, t]


def _family_for(config: RunConfig) -> LossFamily:
    return get_family(config.loss)


def _check_data(data: FederatedDataset, config: RunConfig, family: LossFamily) -> None:
    if data.kind != family.kind:
        raise VariantMismatchError(
            f"{family.name} expects {family.kind} data, got {data.kind}"
        )
    if data.n != config.n or data.K != config.K:
        raise DimensionMismatchError(
            f"dataset is {data.K} x {data.n}, config wants {config.K} x {config.n}"
        )
    if data.dim != config.dim:
        raise DimensionMismatchError(
            f"data dimension {data.dim} != model dimension {config.dim}"
        )


def _draw_noise(config: RunConfig, stream: RngStream | None) -> np.ndarray | None:
    if config.noise_sigma == 0.0:
        return None
    if stream is None:
        stream = derive_stream(config.seed, "noise", 0)
    gen = stream.generator()
    return config.noise_sigma * gen.standard_normal((config.K, config.n, config.dim))


def run_flsgd_arrays(
    feats: np.ndarray,
    labels: np.ndarray | None,
    eta: np.ndarray,
    w0: np.ndarray,
    noise: np.ndarray | None = None,
    keep_iterates: bool = False,
):
    """Kernel-level run on raw arrays; returns (aggregates, iterates or None)."""
    if labels is None:
        return kernels.flsgd_location(feats, eta, w0, noise, keep_iterates)
    return kernels.flsgd_ols(feats, labels, eta, w0, noise, keep_iterates)


def run_flsgd(
    data: FederatedDataset,
    config: RunConfig,
    retention: str = RETAIN_FULL,
    noise_stream: RngStream | None = None,
) -> Trajectory:
    """Execute the full R-round run; every sample is visited exactly once."""
    family = _family_for(config)
    _check_data(data, config, family)
    noise = _draw_noise(config, noise_stream)
    keep = retention == RETAIN_FULL
    aggs, iters = run_flsgd_arrays(
        data.features, data.labels, config.schedule.eta, config.w0, noise, keep
    )
    return Trajectory(aggs, iters, retention, config.schedule, config.w0, noise)


def run_flsgd_replaced(
    data: FederatedDataset,
    rep: Replacement,
    config: RunConfig,
    retention: str = RETAIN_FULL,
    noise_stream: RngStream | None = None,
) -> Trajectory:
    """Reference leave-one-out run: rerun everything on the perturbed dataset."""
    return run_flsgd(apply_replacement(data, rep), config, retention, noise_stream)


def aggregate(models) -> np.ndarray:
    """Coordinatewise mean of the client models, summed in client order."""
    models = list(models)
    if not models:
        raise EmptyListError("cannot aggregate an empty model list")
    first = np.asarray(models[0], dtype=np.float64)
    total = first.copy()
    for m in models[1:]:
        m = np.asarray(m, dtype=np.float64)
        if m.shape != first.shape:
            raise DimensionMismatchError("models must share a dimension")
        total += m
    return total / len(models)


def _chain(family: LossFamily, w_start, feats, labels, rates, noise=None, record=False):
    w_start = np.ascontiguousarray(w_start, dtype=np.float64)
    feats = np.ascontiguousarray(feats, dtype=np.float64)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    if feats.shape[0] != rates.shape[0]:
        raise DimensionMismatchError("need exactly one rate per sample")
    if family.kind == "location":
        return kernels.chain_location(w_start, feats, rates, noise, record)
    labels = np.ascontiguousarray(labels, dtype=np.float64)
    return kernels.chain_ols(w_start, feats, labels, rates, noise, record)


def local_sgd_round(
    w_start: np.ndarray,
    block: RoundBlock,
    rates: np.ndarray,
    family: LossFamily,
    noise_stream: RngStream | None = None,
    noise_sigma: float = 0.0,
):
    """One client's round: tau steps over the block, iterates recorded.

    Returns (final model, iterates) where iterates[t] is the model after step
    t and iterates[0] is the round start.
    """
    noise = None
    if noise_stream is not None and noise_sigma > 0.0:
        gen = noise_stream.generator()
        noise = noise_sigma * gen.standard_normal((block.tau, np.atleast_1d(w_start).shape[0]))
    return _chain(family, w_start, block.features, block.labels, rates, noise, record=True)


def centralized_sgd(w_start, samples, rates, family: LossFamily) -> np.ndarray:
    """Plain sequential SGD over an arbitrary sample list, no aggregation."""
    rates = np.atleast_1d(np.asarray(rates, dtype=np.float64))
    if len(samples) != rates.shape[0]:
        raise DimensionMismatchError("need exactly one rate per sample")
    if len(samples) == 0:
        return np.array(np.atleast_1d(w_start), dtype=np.float64, copy=True)
    if isinstance(samples[0], Sample):
        feats = np.stack([s.features for s in samples])
        labels = (
            np.array([s.label for s in samples], dtype=np.float64)
            if samples[0].kind == "regression"
            else None
        )
    else:
        feats, labels = samples
    w, _ = _chain(family, np.atleast_1d(w_start), feats, labels, rates)
    return w


def centralized_sgd_arrays(w_start, feats, labels, rates, family: LossFamily) -> np.ndarray:
    if feats.shape[0] == 0:
        return np.array(w_start, dtype=np.float64, copy=True)
    w, _ = _chain(family, w_start, feats, labels, rates)
    return w


def divergence_round(rep: Replacement, schedule: Schedule) -> int:
    """The round whose block contains the replaced index."""
    if not 1 <= rep.i <= schedule.n:
        raise IndexOutOfRangeError(f"sample index {rep.i} outside 1..{schedule.n}")
    return (rep.i - 1) // schedule.tau + 1


def replaced_round_end(
    base: Trajectory,
    data: FederatedDataset,
    rep: Replacement,
    family: LossFamily,
) -> np.ndarray:
    """Client rep.k's model at the end of the divergence round under rep.

    Only that round is recomputed: earlier rounds are untouched by the
    replacement, and nothing after the round end is needed.
    """
    r0 = divergence_round(rep, base.schedule)
    tau = base.schedule.tau
    lo = (r0 - 1) * tau
    pos = rep.i - 1 - lo
    feats = np.array(data.features[rep.k - 1, lo : lo + tau], copy=True)
    feats[pos] = rep.ghost.features
    labels = None
    if data.labels is not None:
        labels = np.array(data.labels[rep.k - 1, lo : lo + tau], copy=True)
        labels[pos] = rep.ghost.label
    noise = base.noise[rep.k - 1, lo : lo + tau] if base.noise is not None else None
    w, _ = _chain(
        family,
        base.aggregate_of(r0 - 1),
        feats,
        labels,
        base.schedule.rates(r0),
        noise,
    )
    return w


def replay_from_divergence(
    base: Trajectory,
    data: FederatedDataset,
    rep: Replacement,
    config: RunConfig,
) -> Trajectory:
    """Perturbed trajectory computed by reusing the base run's prefix.

    Rounds before the divergence round and other clients' iterates within it
    are taken from the base; the output is bit-identical to
    ``run_flsgd_replaced`` on the same inputs.
    """
    family = _family_for(config)
    _check_data(data, config, family)
    if base.iterates is None:
        raise RetentionInsufficientError("replay needs a fully retained base trajectory")
    if rep.ghost.kind != data.kind or rep.ghost.dim != data.dim:
        raise VariantMismatchError("ghost sample has a different variant or dimension")

    schedule = config.schedule
    r0 = divergence_round(rep, schedule)
    tau, K, R = schedule.tau, config.K, schedule.R
    kk = rep.k - 1
    lo = (r0 - 1) * tau
    pos = rep.i - 1 - lo

    same = np.array_equal(rep.ghost.features, data.features[kk, rep.i - 1])
    if same and data.labels is not None:
        same = rep.ghost.label == data.labels[kk, rep.i - 1]
    if same:
        return base

    aggs = np.array(base.aggregates, copy=True)
    iters = np.array(base.iterates, copy=True)

    # Divergence round: only client k's steps change before aggregation.
    feats_blk = np.array(data.features[kk, lo : lo + tau], copy=True)
    feats_blk[pos] = rep.ghost.features
    labels_blk = None
    if data.labels is not None:
        labels_blk = np.array(data.labels[kk, lo : lo + tau], copy=True)
        labels_blk[pos] = rep.ghost.label
    noise_blk = base.noise[kk, lo : lo + tau] if base.noise is not None else None
    w_end, blk_iters = _chain(
        family,
        base.aggregate_of(r0 - 1),
        feats_blk,
        labels_blk,
        schedule.rates(r0),
        noise_blk,
        record=True,
    )
    iters[kk, r0 - 1] = blk_iters
    agg = aggregate([iters[j, r0 - 1, tau] for j in range(K)])
    aggs[r0 - 1] = agg

    # Later rounds: the changed aggregate couples every client.
    for r in range(r0 + 1, R + 1):
        lo_r = (r - 1) * tau
        for j in range(K):
            noise_r = base.noise[j, lo_r : lo_r + tau] if base.noise is not None else None
            labels_r = data.labels[j, lo_r : lo_r + tau] if data.labels is not None else None
            _, it = _chain(
                family,
                agg,
                data.features[j, lo_r : lo_r + tau],
                labels_r,
                schedule.rates(r),
                noise_r,
                record=True,
            )
            iters[j, r - 1] = it
        agg = aggregate([iters[j, r - 1, tau] for j in range(K)])
        aggs[r - 1] = agg

    return Trajectory(aggs, iters, RETAIN_FULL, schedule, config.w0, base.noise)
