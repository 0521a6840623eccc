"""Empirical risk, population risk, generalization error and the round proxy.

The generalization error of a hypothesis w on dataset S is the population
risk minus the empirical risk over all nK training samples.  Its expectation
over datasets is estimated by Monte-Carlo: every replicate redraws the data
(and, when enabled, the update noise and the test set) from its own derived
stream, so estimates are reproducible and embarrassingly parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np

from .core import LOCATION, REGRESSION, FederatedDataset, RunConfig
from .distributions import DataDistribution, check_family
from .engine import Trajectory, run_flsgd_arrays
from .errors import (
    DimensionMismatchError,
    NoClosedFormError,
    RetentionInsufficientError,
    VariantMismatchError,
)
from .losses import OLS_REGRESSION, SQUARED_LOCATION, LossFamily
from .parallel import map_replicates
from .rng import derive_stream


def _family_for_kind(kind: str) -> LossFamily:
    return SQUARED_LOCATION if kind == LOCATION else OLS_REGRESSION


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo mean with its standard error."""

    mean: float
    se: float
    replicates: int

    def __add__(self, other: "MCEstimate") -> "MCEstimate":
        # Independent estimates: means add, standard errors in quadrature.
        if other.se == 0.0:
            se = self.se
        elif self.se == 0.0:
            se = other.se
        else:
            se = math.sqrt(self.se**2 + other.se**2)
        return MCEstimate(self.mean + other.mean, se, min(self.replicates, other.replicates))


def mc_estimate(values: Sequence[float]) -> MCEstimate:
    """Mean and standard error, accumulated in replicate order."""
    m = len(values)
    if m < 1:
        raise DimensionMismatchError("need at least one replicate")
    total = 0.0
    for v in values:
        total += float(v)
    mean = total / m
    if m == 1:
        return MCEstimate(mean, 0.0, 1)
    ssq = 0.0
    for v in values:
        ssq += (float(v) - mean) ** 2
    return MCEstimate(mean, math.sqrt(ssq / (m - 1) / m), m)


@dataclass(frozen=True)
class RiskReport:
    """Empirical risk, population risk and their gap for one hypothesis."""

    empirical: float
    population: float | MCEstimate
    gen: float


def _mean_losses(family: LossFamily, feats2d: np.ndarray, labels1d, w: np.ndarray) -> float:
    losses = family.loss_vector(feats2d, labels1d, w)
    total = 0.0
    for v in losses:
        total += v
    return total / losses.shape[0]


def empirical_risk(data: FederatedDataset, w, family: LossFamily) -> float:
    """Mean loss of w over all nK samples, summed in (client, index) order."""
    if data.kind != family.kind:
        raise VariantMismatchError(f"{family.name} cannot score {data.kind} data")
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    if w.shape[0] != data.dim:
        raise DimensionMismatchError("model and data dimensions differ")
    feats = data.features.reshape(-1, data.dim)
    labels = data.labels.reshape(-1) if data.labels is not None else None
    return _mean_losses(family, feats, labels, w)


def population_risk(
    mu: DataDistribution,
    w,
    family: LossFamily,
    mode: str = "exact",
    n_test: int = 1000,
    stream=None,
):
    """Exact E[loss(Z, w)] or its Monte-Carlo estimate over n_test fresh draws."""
    check_family(mu, family)
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    if mode == "exact":
        value = mu.closed_form_risk(w)
        if value is None:
            raise NoClosedFormError(f"{type(mu).__name__} has no closed-form population risk")
        return value
    if mode != "montecarlo":
        raise ValueError(f"unknown mode {mode!r}")
    if stream is None:
        raise ValueError("montecarlo mode needs a stream")
    feats, labels = mu.test_arrays(stream.generator(), n_test)
    losses = family.loss_vector(feats, labels, w)
    return mc_estimate(list(losses))


def _population_mean(mu, w, family, n_test, stream) -> float:
    value = mu.closed_form_risk(w)
    if value is not None:
        return value
    feats, labels = mu.test_arrays(stream.generator(), n_test)
    return _mean_losses(family, feats, labels, w)


def gen_error(
    data: FederatedDataset,
    w,
    mu: DataDistribution,
    family: LossFamily,
    mode: str = "exact",
    n_test: int = 1000,
    stream=None,
) -> RiskReport:
    """Population minus empirical risk, with both parts reported."""
    emp = empirical_risk(data, w, family)
    pop = population_risk(mu, w, family, mode, n_test, stream)
    pop_mean = pop.mean if isinstance(pop, MCEstimate) else pop
    return RiskReport(emp, pop, pop_mean - emp)


def _proxy_from_arrays(traj, feats, labels, mu, family, n_test, stream) -> float:
    R, tau = traj.schedule.R, traj.schedule.tau
    K = feats.shape[0]
    if traj.aggregates is None or traj.aggregates.shape[0] != R:
        raise RetentionInsufficientError("proxy needs every round aggregate")
    test = None
    if mu.closed_form_risk(traj.final) is None:
        test = mu.test_arrays(stream.generator(), n_test)
    total = 0.0
    for r in range(1, R + 1):
        w = traj.aggregate_of(r)
        if test is None:
            pop = mu.closed_form_risk(w)
        else:
            pop = _mean_losses(family, test[0], test[1], w)
        emp = 0.0
        lo = (r - 1) * tau
        for k in range(K):
            labs = labels[k, lo : lo + tau] if labels is not None else None
            emp += _mean_losses(family, feats[k, lo : lo + tau], labs, w)
        total += pop - emp / K
    return total / R


def proxy_delta_sgd(
    traj: Trajectory,
    data: FederatedDataset,
    mu: DataDistribution,
    family: LossFamily,
    n_test: int = 1000,
    stream=None,
) -> float:
    """Round-averaged gap: each round's aggregate scored on that round's block.

    Collapses to the plain generalization error of the final model when R = 1.
    A single test draw (from `stream`) is shared by all rounds when the
    distribution has no closed-form risk.
    """
    check_family(mu, family)
    if stream is None and mu.closed_form_risk(traj.final) is None:
        raise ValueError("proxy needs a stream when no closed form exists")
    return _proxy_from_arrays(traj, data.features, data.labels, mu, family, n_test, stream)


def _gen_replicate_stats(config: RunConfig, mu, family, n_test, want_proxy, m) -> tuple:
    """(gen, emp, pop, proxy) of the replicate-m run on freshly drawn data."""
    gen = derive_stream(config.seed, "gen-data", m).generator()
    feats, labels = mu.draw_arrays(gen, config.K * config.n)
    feats = np.ascontiguousarray(feats.reshape(config.K, config.n, mu.dim))
    labels = labels.reshape(config.K, config.n) if labels is not None else None
    noise = None
    if config.noise_sigma > 0.0:
        noise_gen = derive_stream(config.seed, "gen-noise", m).generator()
        noise = config.noise_sigma * noise_gen.standard_normal(
            (config.K, config.n, config.dim)
        )
    aggs, _ = run_flsgd_arrays(feats, labels, config.schedule.eta, config.w0, noise, False)
    w = aggs[-1]

    flat_feats = feats.reshape(-1, mu.dim)
    flat_labels = labels.reshape(-1) if labels is not None else None
    emp = _mean_losses(family, flat_feats, flat_labels, w)
    test_stream = derive_stream(config.seed, "gen-test", m)
    pop = _population_mean(mu, w, family, n_test, test_stream)
    proxy = math.nan
    if want_proxy:
        traj = Trajectory(aggs, None, "aggregates", config.schedule, config.w0, None)
        proxy = _proxy_from_arrays(traj, feats, labels, mu, family, n_test, test_stream)
    return pop - emp, emp, pop, proxy


def _gen_worker(config, mu, family, n_test, want_proxy, rng_range):
    return [
        _gen_replicate_stats(config, mu, family, n_test, want_proxy, m) for m in rng_range
    ]


def gen_replicate_table(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    replicates: int,
    n_test: int = 1000,
    want_proxy: bool = False,
    threads: int = 1,
) -> list[tuple]:
    """Per-replicate (gen, emp, pop, proxy) rows in replicate order."""
    check_family(mu, family)
    if family.name != config.loss:
        raise VariantMismatchError("family does not match the config's loss id")
    worker = partial(_gen_worker, config, mu, family, n_test, want_proxy)
    return map_replicates(worker, replicates, threads)


def expected_gen_error(
    config: RunConfig,
    mu: DataDistribution,
    family: LossFamily,
    replicates: int,
    n_test: int = 1000,
    threads: int = 1,
) -> MCEstimate:
    """Monte-Carlo estimate of the expected generalization error.

    Replicate m draws a fresh nK-sample dataset from stream ("gen-data", m),
    runs FL-SGD, and scores the final aggregate; results are reduced in
    replicate order.
    """
    rows = gen_replicate_table(config, mu, family, replicates, n_test, False, threads)
    return mc_estimate([row[0] for row in rows])
