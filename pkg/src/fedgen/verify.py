"""The stock verification suite: hand-checked instances plus randomized ones.

Identity checks must agree to 1e-10 and inequality checks must have
nonnegative slack (up to the same tolerance) on every setup.  Setups are
generated from a fixed seed so the suite is reproducible; shapes stay inside
the enumeration guard.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Schedule
from .distributions import FiniteDistribution
from .oracle import IDENTITY_TOL, OracleReport, OracleSetup, check_identity, check_inequality

SUITE_SEED = 20230817


@dataclass(frozen=True)
class CheckResult:
    label: str
    report: OracleReport

    @property
    def passed(self) -> bool:
        return self.report.passed(IDENTITY_TOL)


def _uniform01(d: int) -> FiniteDistribution:
    pts = np.zeros((2, d))
    pts[1] = 1.0
    return FiniteDistribution.uniform_locations(pts)


def hand_setups() -> list[tuple[str, str, OracleSetup]]:
    """The hand-derived instances with known (lhs, rhs) values."""
    tiny = OracleSetup(
        dist=_uniform01(1),
        K=2,
        schedule=Schedule.constant(1, 1, 0.5),
        w0=np.zeros(1),
    )
    solo = OracleSetup(
        dist=_uniform01(1),
        K=1,
        schedule=Schedule.constant(1, 1, 0.5),
        w0=np.zeros(1),
    )
    return [
        ("leave_one_out", "hand-m1", solo),
        ("corollary_one_shot", "hand-K2n1", tiny),
        ("theorem", "hand-K2n1", tiny),
    ]


def _random_setup(gen: np.random.Generator, K: int, n: int, R: int, support: int) -> OracleSetup:
    d = int(gen.integers(1, 3))
    pts = gen.uniform(-1.0, 1.0, size=(support, d))
    if gen.random() < 0.5:
        probs = np.full(support, 1.0 / support)
    else:
        raw = gen.uniform(0.2, 1.0, size=support)
        probs = raw / raw.sum()
    samples = FiniteDistribution.uniform_locations(pts).samples
    dist = FiniteDistribution(samples, probs)
    tau = n // R
    eta = gen.uniform(0.05, 0.45, size=(R, tau))
    w0 = gen.uniform(-0.5, 0.5, size=d) if gen.random() < 0.5 else np.zeros(d)
    return OracleSetup(dist=dist, K=K, schedule=Schedule(eta), w0=w0)


def randomized_setups(seed: int = SUITE_SEED) -> list[tuple[str, OracleSetup]]:
    """At least 20 enumerable setups with K <= 3, n <= 4, R <= 2, support <= 3."""
    gen = np.random.default_rng(seed)
    shapes = [
        # (K, n, R, support); sized to keep support^(nK + 1) modest
        (1, 1, 1, 3),
        (1, 2, 1, 3),
        (1, 4, 1, 2),
        (2, 1, 1, 3),
        (2, 2, 1, 3),
        (2, 4, 1, 2),
        (3, 2, 1, 2),
        (3, 1, 1, 3),
        (3, 2, 1, 3),
        (1, 2, 2, 3),
        (1, 4, 2, 2),
        (1, 4, 2, 3),
        (2, 2, 2, 2),
        (2, 2, 2, 3),
        (2, 4, 2, 2),
        (3, 2, 2, 2),
        (3, 2, 2, 3),
        (3, 4, 2, 2),
        (1, 2, 2, 2),
        (2, 4, 1, 3),
        (3, 4, 1, 2),
        (2, 2, 1, 2),
    ]
    out = []
    for K, n, R, support in shapes:
        label = f"K{K}n{n}R{R}s{support}"
        out.append((label, _random_setup(gen, K, n, R, support)))
    return out


def cq_zero_setups(seed: int = SUITE_SEED + 1) -> list[tuple[str, OracleSetup]]:
    """Three-round setups: q < r coupling terms only exist for R >= 3."""
    gen = np.random.default_rng(seed)
    out = []
    for K, n, support in [(2, 3, 2), (1, 3, 3)]:
        label = f"K{K}n{n}R3s{support}"
        out.append((label, _random_setup(gen, K, n, 3, support)))
    return out


def _checks_for(setup: OracleSetup) -> list[str]:
    checks = ["leave_one_out"]
    if setup.R == 1:
        checks += ["corollary_one_shot", "theorem"]
    elif setup.R == 2:
        checks += ["term_a", "term_b2", "decomp_r2", "term_b1", "theorem"]
    return checks


def run_suite(perturb_aggregation: float = 0.0, seed: int = SUITE_SEED) -> list[CheckResult]:
    """All checks over the stock setups; results in execution order."""
    results: list[CheckResult] = []

    for which, tag, setup in hand_setups():
        if perturb_aggregation != 0.0:
            setup = OracleSetup(
                setup.dist, setup.K, setup.schedule, setup.w0, setup.L, perturb_aggregation
            )
        fn = check_identity if which in ("leave_one_out", "corollary_one_shot") else check_inequality
        results.append(CheckResult(f"{which}[{tag}]", fn(which, setup)))

    for label, setup in randomized_setups(seed):
        if perturb_aggregation != 0.0:
            setup = OracleSetup(
                setup.dist, setup.K, setup.schedule, setup.w0, setup.L, perturb_aggregation
            )
        for which in _checks_for(setup):
            fn = (
                check_inequality
                if which in ("term_b1", "theorem")
                else check_identity
            )
            results.append(CheckResult(f"{which}[{label}]", fn(which, setup)))

    for label, setup in cq_zero_setups(seed + 1):
        results.append(CheckResult(f"cq_zero[{label}]", check_identity("cq_zero", setup)))

    return results
