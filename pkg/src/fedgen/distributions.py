"""Data distributions: draws, closed-form population risks, CSV pools.

Each distribution knows which loss family it feeds (location distributions
pair with ``squared_location``, regression ones with ``ols_regression``) and
exposes array-level draws so the Monte-Carlo loops never materialize Sample
objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import LOCATION, REGRESSION, Sample, location_sample, regression_sample
from .errors import (
    DimensionMismatchError,
    DomainError,
    FamilyMismatchError,
    VariantMismatchError,
)
from .losses import LossFamily
from .rng import RngStream

FRIEDMAN1_DIM = 10


def friedman1_response(x) -> float:
    """Noise-free friedman1 response; x must lie in the unit hypercube."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (FRIEDMAN1_DIM,):
        raise DimensionMismatchError(f"friedman1 features have dimension {FRIEDMAN1_DIM}")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("friedman1 features must lie in [0, 1]^10")
    return float(
        10.0 * math.sin(math.pi * x[0] * x[1])
        + 20.0 * (x[2] - 0.5) ** 2
        + 10.0 * x[3]
        + 5.0 * x[4]
    )


def _friedman1_batch(x: np.ndarray) -> np.ndarray:
    return (
        10.0 * np.sin(np.pi * x[:, 0] * x[:, 1])
        + 20.0 * (x[:, 2] - 0.5) ** 2
        + 10.0 * x[:, 3]
        + 5.0 * x[:, 4]
    )


@dataclass(frozen=True)
class FiniteDistribution:
    """A finite-support distribution given by samples and probabilities."""

    samples: tuple[Sample, ...]
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if len(self.samples) < 1 or probs.shape != (len(self.samples),):
            raise DimensionMismatchError("need one probability per support point")
        if np.any(probs <= 0.0):
            raise VariantMismatchError("support probabilities must be positive")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise VariantMismatchError("support probabilities must sum to 1")
        kind, dim = self.samples[0].kind, self.samples[0].dim
        for s in self.samples:
            if s.kind != kind or s.dim != dim:
                raise VariantMismatchError("support points must share variant and dimension")
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform_locations(cls, points) -> "FiniteDistribution":
        pts = [location_sample(p) for p in points]
        return cls(tuple(pts), np.full(len(pts), 1.0 / len(pts)))

    @property
    def size(self) -> int:
        return len(self.samples)

    @property
    def kind(self) -> str:
        return self.samples[0].kind

    @property
    def dim(self) -> int:
        return self.samples[0].dim

    def feature_matrix(self) -> np.ndarray:
        return np.stack([s.features for s in self.samples])

    def label_vector(self) -> np.ndarray | None:
        if self.kind == LOCATION:
            return None
        return np.array([s.label for s in self.samples])


class DataDistribution:
    """Base for the concrete distribution variants."""

    kind: str
    dim: int

    def draw_arrays(self, gen: np.random.Generator, count: int):
        """(features, labels or None) for `count` i.i.d. draws."""
        raise NotImplementedError

    def closed_form_risk(self, w: np.ndarray) -> float | None:
        """Exact population risk of w, or None when no closed form exists."""
        return None

    def test_arrays(self, gen: np.random.Generator, count: int):
        """Draws used for held-out risk estimation (same law by default)."""
        return self.draw_arrays(gen, count)


@dataclass(frozen=True)
class GaussianLocation(DataDistribution):
    """z ~ N(mean, sigma^2 I)."""

    mean: np.ndarray
    sigma: float = 1.0
    kind: str = field(default=LOCATION, init=False)

    def __post_init__(self):
        object.__setattr__(self, "mean", np.atleast_1d(np.asarray(self.mean, dtype=np.float64)))
        if self.sigma < 0.0:
            raise VariantMismatchError("sigma must be nonnegative")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def draw_arrays(self, gen, count):
        z = self.mean + self.sigma * gen.standard_normal((count, self.dim))
        return z, None

    def closed_form_risk(self, w):
        diff = np.asarray(w, dtype=np.float64) - self.mean
        return float(np.dot(diff, diff) + self.dim * self.sigma**2)


@dataclass(frozen=True)
class GaussianLinear(DataDistribution):
    """x ~ N(0, I_d), y = w*.x + noise_sigma * N(0, 1)."""

    wstar: np.ndarray
    noise_sigma: float = 1.0
    kind: str = field(default=REGRESSION, init=False)

    def __post_init__(self):
        object.__setattr__(self, "wstar", np.atleast_1d(np.asarray(self.wstar, dtype=np.float64)))
        if self.noise_sigma < 0.0:
            raise VariantMismatchError("noise_sigma must be nonnegative")

    @property
    def dim(self) -> int:
        return self.wstar.shape[0]

    def draw_arrays(self, gen, count):
        x = gen.standard_normal((count, self.dim))
        y = x @ self.wstar + self.noise_sigma * gen.standard_normal(count)
        return x, y

    def closed_form_risk(self, w):
        diff = np.asarray(w, dtype=np.float64) - self.wstar
        return float(np.dot(diff, diff) + self.noise_sigma**2)


@dataclass(frozen=True)
class Friedman1(DataDistribution):
    """x ~ U[0,1]^10, y = friedman1_response(x) + noise_sigma * N(0, 1)."""

    noise_sigma: float = 1.0
    kind: str = field(default=REGRESSION, init=False)

    def __post_init__(self):
        if self.noise_sigma < 0.0:
            raise VariantMismatchError("noise_sigma must be nonnegative")

    @property
    def dim(self) -> int:
        return FRIEDMAN1_DIM

    def draw_arrays(self, gen, count):
        x = gen.random((count, FRIEDMAN1_DIM))
        y = _friedman1_batch(x)
        if self.noise_sigma > 0.0:
            y = y + self.noise_sigma * gen.standard_normal(count)
        return x, y


@dataclass(frozen=True)
class Finite(DataDistribution):
    """Draws from a known finite support; population risk is a weighted sum."""

    dist: FiniteDistribution

    @property
    def kind(self) -> str:
        return self.dist.kind

    @property
    def dim(self) -> int:
        return self.dist.dim

    def draw_arrays(self, gen, count):
        idx = gen.choice(self.dist.size, size=count, p=self.dist.probs)
        feats = self.dist.feature_matrix()[idx]
        labels = self.dist.label_vector()
        return feats, labels[idx] if labels is not None else None

    def closed_form_risk(self, w):
        from .risks import _family_for_kind  # local import to avoid a cycle

        family = _family_for_kind(self.kind)
        w = np.asarray(w, dtype=np.float64)
        losses = family.loss_vector(self.dist.feature_matrix(), self.dist.label_vector(), w)
        total = 0.0
        for p, v in zip(self.dist.probs, losses):
            total += p * v
        return float(total)


@dataclass(frozen=True)
class Empirical(DataDistribution):
    """Uniform draws from a sample pool, with a held-out half for evaluation.

    The pool is split once (seeded shuffle); training draws come from one
    half, risk evaluation draws from the other, so the two never overlap.
    """

    train_features: np.ndarray
    eval_features: np.ndarray
    train_labels: np.ndarray | None = None
    eval_labels: np.ndarray | None = None

    @classmethod
    def from_pool(
        cls,
        features: np.ndarray,
        labels: np.ndarray | None,
        split_stream: RngStream,
        eval_fraction: float = 0.5,
    ) -> "Empirical":
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] < 2:
            raise DimensionMismatchError("empirical pool needs at least two (n, d) rows")
        order = split_stream.generator().permutation(features.shape[0])
        cut = max(1, int(round(features.shape[0] * eval_fraction)))
        cut = min(cut, features.shape[0] - 1)
        ev, tr = order[:cut], order[cut:]
        if labels is None:
            return cls(features[tr], features[ev])
        labels = np.asarray(labels, dtype=np.float64)
        return cls(features[tr], features[ev], labels[tr], labels[ev])

    @property
    def kind(self) -> str:
        return LOCATION if self.train_labels is None else REGRESSION

    @property
    def dim(self) -> int:
        return self.train_features.shape[1]

    def draw_arrays(self, gen, count):
        idx = gen.integers(0, self.train_features.shape[0], size=count)
        labels = self.train_labels[idx] if self.train_labels is not None else None
        return self.train_features[idx], labels

    def test_arrays(self, gen, count):
        idx = gen.integers(0, self.eval_features.shape[0], size=count)
        labels = self.eval_labels[idx] if self.eval_labels is not None else None
        return self.eval_features[idx], labels


def check_family(mu: DataDistribution, family: LossFamily) -> None:
    if mu.kind != family.kind:
        raise FamilyMismatchError(
            f"distribution produces {mu.kind} samples, family {family.name} wants {family.kind}"
        )


def draw(mu: DataDistribution, stream: RngStream, count: int) -> list[Sample]:
    """`count` i.i.d. samples, deterministic given the stream."""
    if count < 0:
        raise DimensionMismatchError("count must be nonnegative")
    if count == 0:
        return []
    feats, labels = mu.draw_arrays(stream.generator(), count)
    if labels is None:
        return [location_sample(feats[i]) for i in range(count)]
    return [regression_sample(feats[i], labels[i]) for i in range(count)]


def closed_form_population_risk(mu: DataDistribution, w, family: LossFamily) -> float | None:
    """Exact population risk when the distribution has one, else None."""
    check_family(mu, family)
    return mu.closed_form_risk(np.atleast_1d(np.asarray(w, dtype=np.float64)))
