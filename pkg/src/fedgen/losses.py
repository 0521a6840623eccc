"""Bregman-divergence loss families and their gradients.

Two families are built in.  ``squared_location`` is the squared Euclidean
distance between model and sample, the Bregman divergence of the potential
``v -> ||v||^2``.  ``ols_regression`` is the squared residual of a linear
predictor, the Bregman divergence of the scalar potential ``u -> u^2`` applied
to (prediction, label).  Both potentials have 2-Lipschitz gradients, so the
smoothness constant is 2 for each family.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .core import LOCATION, REGRESSION, Sample
from .errors import DimensionMismatchError, VariantMismatchError


def bregman(f: Callable, grad_f: Callable, w, z) -> float:
    """D_f(w, z) = f(w) - f(z) - <grad f(z), w - z> for a convex potential f."""
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if w.shape != z.shape:
        raise DimensionMismatchError("bregman arguments must have equal shape")
    g = np.atleast_1d(np.asarray(grad_f(z), dtype=np.float64))
    return float(f(w) - f(z) - np.dot(g, w - z))


def squared_norm(v) -> float:
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    return float(np.dot(v, v))


def squared_norm_grad(v) -> np.ndarray:
    return 2.0 * np.atleast_1d(np.asarray(v, dtype=np.float64))


class LossFamily:
    """A loss with its gradients, sample-potential gradient and smoothness L."""

    name: str
    kind: str
    smoothness: float = 2.0

    def loss(self, sample: Sample, w: np.ndarray) -> float:
        raise NotImplementedError

    def grad_w(self, sample: Sample, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_potential_grad(self, sample: Sample) -> np.ndarray:
        """grad F evaluated at the sample's Bregman argument."""
        raise NotImplementedError

    def loss_vector(self, feats: np.ndarray, labels: np.ndarray | None, w: np.ndarray) -> np.ndarray:
        """Per-row losses for an array of samples."""
        raise NotImplementedError

    def _check(self, sample: Sample) -> None:
        if sample.kind != self.kind:
            raise VariantMismatchError(
                f"{self.name} expects {self.kind} samples, got {sample.kind}"
            )


class SquaredLocation(LossFamily):
    """loss(z, w) = ||w - z||^2, the divergence of F = ||.||^2."""

    name = "squared_location"
    kind = LOCATION

    def loss(self, sample, w):
        self._check(sample)
        diff = np.asarray(w, dtype=np.float64) - sample.features
        return float(np.dot(diff, diff))

    def grad_w(self, sample, w):
        self._check(sample)
        return 2.0 * (np.asarray(w, dtype=np.float64) - sample.features)

    def sample_potential_grad(self, sample):
        self._check(sample)
        return 2.0 * sample.features

    def loss_vector(self, feats, labels, w):
        diff = feats - w
        return np.sum(diff * diff, axis=-1)


class OlsRegression(LossFamily):
    """loss((x, y), w) = (w.x - y)^2, the divergence of F(u) = u^2."""

    name = "ols_regression"
    kind = REGRESSION

    def loss(self, sample, w):
        self._check(sample)
        resid = float(np.dot(np.asarray(w, dtype=np.float64), sample.features)) - sample.label
        return resid * resid

    def grad_w(self, sample, w):
        self._check(sample)
        resid = float(np.dot(np.asarray(w, dtype=np.float64), sample.features)) - sample.label
        return (2.0 * resid) * sample.features

    def sample_potential_grad(self, sample):
        # F is applied to the label axis, so grad F(z~) is the scalar 2y.
        self._check(sample)
        return np.array([2.0 * sample.label])

    def loss_vector(self, feats, labels, w):
        resid = feats @ w - labels
        return resid * resid


SQUARED_LOCATION = SquaredLocation()
OLS_REGRESSION = OlsRegression()

_FAMILIES = {f.name: f for f in (SQUARED_LOCATION, OLS_REGRESSION)}


def get_family(name: str) -> LossFamily:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise VariantMismatchError(f"unknown loss family {name!r}") from None


def loss(family: LossFamily, sample: Sample, w) -> float:
    return family.loss(sample, np.atleast_1d(np.asarray(w, dtype=np.float64)))


def grad_w_loss(family: LossFamily, sample: Sample, w) -> np.ndarray:
    return family.grad_w(sample, np.atleast_1d(np.asarray(w, dtype=np.float64)))


def potential_grad_at_sample(family: LossFamily, sample: Sample) -> np.ndarray:
    return family.sample_potential_grad(sample)


def smoothness_constant(family: LossFamily, override: float | None = None) -> float:
    """The family's L, or the config override when one is set."""
    if override is not None:
        if override <= 0.0:
            raise VariantMismatchError("smoothness override must be positive")
        return float(override)
    return family.smoothness
