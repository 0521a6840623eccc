import numpy as np
import pytest

from fedgen.core import RunConfig, Schedule
from fedgen.distributions import Finite, FiniteDistribution


@pytest.fixture
def uniform01():
    """Uniform two-point location support {0, 1} in one dimension."""
    return FiniteDistribution.uniform_locations(np.array([[0.0], [1.0]]))


@pytest.fixture
def tiny_config():
    """K=2, n=1, R=1, eta=0.5: the exactly enumerable hand instance."""
    return RunConfig(
        n=1,
        K=2,
        schedule=Schedule.constant(1, 1, 0.5),
        w0=np.zeros(1),
        loss="squared_location",
        seed=0,
    )


@pytest.fixture
def tiny_mu(uniform01):
    return Finite(uniform01)


def spearman(xs, ys) -> float:
    """Spearman rank correlation (no-tie data)."""
    def ranks(vals):
        order = sorted(range(len(vals)), key=lambda i: vals[i])
        r = [0.0] * len(vals)
        for rank, i in enumerate(order):
            r[i] = float(rank)
        return r

    rx, ry = ranks(list(xs)), ranks(list(ys))
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = (
        sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry)
    ) ** 0.5
    return num / den if den else 0.0
