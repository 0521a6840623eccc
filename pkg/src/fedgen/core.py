"""Domain types for federated datasets, schedules and run configuration.

Indices follow the mathematical convention used throughout the package:
clients are ``1..K``, samples ``1..n``, rounds ``1..R``.  All types are
immutable values; arrays are stored read-only so they can be shared freely
between worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    NonDivisibleError,
    VariantMismatchError,
)

LOCATION = "location"
REGRESSION = "regression"


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Sample:
    """One data point: a location vector, or a feature vector with a label."""

    features: np.ndarray
    label: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen(np.atleast_1d(self.features)))
        if not np.all(np.isfinite(self.features)):
            raise VariantMismatchError("sample features must be finite")
        if self.label is not None:
            lab = float(self.label)
            if not np.isfinite(lab):
                raise VariantMismatchError("sample label must be finite")
            object.__setattr__(self, "label", lab)

    @property
    def kind(self) -> str:
        return LOCATION if self.label is None else REGRESSION

    @property
    def dim(self) -> int:
        return self.features.shape[0]


def location_sample(z) -> Sample:
    return Sample(np.atleast_1d(np.asarray(z, dtype=np.float64)))


def regression_sample(x, y: float) -> Sample:
    return Sample(np.atleast_1d(np.asarray(x, dtype=np.float64)), float(y))


class ClientDataset:
    """Ordered samples of one client; order defines the SGD visit sequence."""

    __slots__ = ("features", "labels")

    def __init__(self, features: np.ndarray, labels: np.ndarray | None = None):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] < 1:
            raise DimensionMismatchError("features must be a nonempty (n, d) array")
        if not np.all(np.isfinite(features)):
            raise VariantMismatchError("dataset features must be finite")
        self.features = _frozen(features)
        if labels is None:
            self.labels = None
        else:
            labels = np.asarray(labels, dtype=np.float64)
            if labels.shape != (features.shape[0],):
                raise DimensionMismatchError("labels must be a length-n vector")
            if not np.all(np.isfinite(labels)):
                raise VariantMismatchError("dataset labels must be finite")
            self.labels = _frozen(labels)

    @classmethod
    def from_samples(cls, samples: Sequence[Sample]) -> "ClientDataset":
        if len(samples) == 0:
            raise DimensionMismatchError("a client dataset needs at least one sample")
        kind = samples[0].kind
        dim = samples[0].dim
        for s in samples:
            if s.kind != kind or s.dim != dim:
                raise VariantMismatchError("all samples must share variant and dimension")
        feats = np.stack([s.features for s in samples])
        labels = np.array([s.label for s in samples]) if kind == REGRESSION else None
        return cls(feats, labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def kind(self) -> str:
        return LOCATION if self.labels is None else REGRESSION

    def sample(self, i: int) -> Sample:
        """Sample at 1-based position i."""
        if not 1 <= i <= self.n:
            raise IndexOutOfRangeError(f"sample index {i} outside 1..{self.n}")
        if self.labels is None:
            return Sample(self.features[i - 1])
        return Sample(self.features[i - 1], float(self.labels[i - 1]))

    def samples(self) -> list[Sample]:
        return [self.sample(i) for i in range(1, self.n + 1)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClientDataset):
            return NotImplemented
        if self.kind != other.kind or self.features.shape != other.features.shape:
            return False
        same = bool(np.array_equal(self.features, other.features))
        if self.labels is not None:
            same = same and bool(np.array_equal(self.labels, other.labels))
        return same


class FederatedDataset:
    """K client datasets of equal size n; stacked arrays back the engine."""

    __slots__ = ("features", "labels")

    def __init__(self, clients: Sequence[ClientDataset]):
        if len(clients) < 1:
            raise DimensionMismatchError("need at least one client")
        ref = clients[0]
        for c in clients:
            if c.n != ref.n or c.dim != ref.dim or c.kind != ref.kind:
                raise VariantMismatchError("clients must agree in size, dimension and variant")
        self.features = _frozen(np.stack([c.features for c in clients]))
        if ref.kind == REGRESSION:
            self.labels = _frozen(np.stack([c.labels for c in clients]))
        else:
            self.labels = None

    @classmethod
    def from_arrays(cls, features: np.ndarray, labels: np.ndarray | None = None) -> "FederatedDataset":
        obj = cls.__new__(cls)
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 3:
            raise DimensionMismatchError("features must be a (K, n, d) array")
        obj.features = _frozen(features)
        if labels is not None:
            labels = np.asarray(labels, dtype=np.float64)
            if labels.shape != features.shape[:2]:
                raise DimensionMismatchError("labels must be a (K, n) array")
            obj.labels = _frozen(labels)
        else:
            obj.labels = None
        return obj

    @property
    def K(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    @property
    def dim(self) -> int:
        return self.features.shape[2]

    @property
    def kind(self) -> str:
        return LOCATION if self.labels is None else REGRESSION

    def client(self, k: int) -> ClientDataset:
        """Client dataset at 1-based position k."""
        if not 1 <= k <= self.K:
            raise IndexOutOfRangeError(f"client index {k} outside 1..{self.K}")
        labels = self.labels[k - 1] if self.labels is not None else None
        return ClientDataset(self.features[k - 1], labels)

    def clients(self) -> list[ClientDataset]:
        return [self.client(k) for k in range(1, self.K + 1)]


@dataclass(frozen=True)
class RoundBlock:
    """The samples a client visits during one round (1-based index interval)."""

    r: int
    lo: int
    hi: int
    features: np.ndarray
    labels: np.ndarray | None = None

    @property
    def tau(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class Replacement:
    """Replace sample i of client k with the ghost sample."""

    k: int
    i: int
    ghost: Sample


@dataclass(frozen=True)
class Schedule:
    """Learning-rate table eta[r, t] for R rounds of tau steps each."""

    eta: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.float64)
        if eta.ndim != 2:
            raise DimensionMismatchError("eta must be an (R, tau) table")
        if not np.all(np.isfinite(eta)) or np.any(eta <= 0.0):
            raise VariantMismatchError("learning rates must be strictly positive and finite")
        object.__setattr__(self, "eta", _frozen(eta))

    @classmethod
    def constant(cls, R: int, tau: int, eta: float) -> "Schedule":
        return cls(np.full((R, tau), float(eta)))

    @property
    def R(self) -> int:
        return self.eta.shape[0]

    @property
    def tau(self) -> int:
        return self.eta.shape[1]

    @property
    def n(self) -> int:
        return self.R * self.tau

    def rates(self, r: int) -> np.ndarray:
        """Rates of round r (1-based)."""
        if not 1 <= r <= self.R:
            raise IndexOutOfRangeError(f"round {r} outside 1..{self.R}")
        return self.eta[r - 1]

    def flat(self) -> np.ndarray:
        return self.eta.reshape(-1)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one FL-SGD run except the data."""

    n: int
    K: int
    schedule: Schedule
    w0: np.ndarray
    loss: str
    noise_sigma: float = 0.0
    seed: int = 0
    smoothness: float | None = None  # overrides the loss family's L downstream

    def __post_init__(self):
        object.__setattr__(self, "w0", _frozen(np.atleast_1d(self.w0)))
        if self.n != self.schedule.n:
            raise DimensionMismatchError(
                f"schedule covers {self.schedule.n} steps but n = {self.n}"
            )
        if self.n < 1 or self.K < 1:
            raise DimensionMismatchError("n and K must be at least 1")
        if self.noise_sigma < 0.0:
            raise VariantMismatchError("noise_sigma must be nonnegative")

    @property
    def dim(self) -> int:
        return self.w0.shape[0]


def partition_rounds(dataset: ClientDataset, R: int) -> list[RoundBlock]:
    """Split a client dataset into R consecutive round blocks of size n/R."""
    if R < 1:
        raise NonDivisibleError("R must be at least 1")
    n = dataset.n
    if n % R != 0:
        raise NonDivisibleError(f"R = {R} does not divide n = {n}")
    tau = n // R
    blocks = []
    for r in range(1, R + 1):
        lo, hi = (r - 1) * tau + 1, r * tau
        labels = dataset.labels[lo - 1 : hi] if dataset.labels is not None else None
        blocks.append(RoundBlock(r, lo, hi, dataset.features[lo - 1 : hi], labels))
    return blocks


def replace_sample(dataset: ClientDataset, i: int, ghost: Sample) -> ClientDataset:
    """Copy of the dataset with the sample at 1-based position i replaced."""
    if not 1 <= i <= dataset.n:
        raise IndexOutOfRangeError(f"sample index {i} outside 1..{dataset.n}")
    if ghost.kind != dataset.kind or ghost.dim != dataset.dim:
        raise VariantMismatchError("replacement sample has a different variant or dimension")
    feats = np.array(dataset.features, copy=True)
    feats[i - 1] = ghost.features
    if dataset.labels is None:
        return ClientDataset(feats)
    labels = np.array(dataset.labels, copy=True)
    labels[i - 1] = ghost.label
    return ClientDataset(feats, labels)


def apply_replacement(data: FederatedDataset, rep: Replacement) -> FederatedDataset:
    """Federated dataset with replacement applied to the named client."""
    if not 1 <= rep.k <= data.K:
        raise IndexOutOfRangeError(f"client index {rep.k} outside 1..{data.K}")
    clients = data.clients()
    clients[rep.k - 1] = replace_sample(clients[rep.k - 1], rep.i, rep.ghost)
    return FederatedDataset(clients)
