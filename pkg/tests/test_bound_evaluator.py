import numpy as np
import pytest

from fedgen.bound import (
    ModifiedSgdSpec,
    b_coefficient,
    modified_sgd_model,
    one_shot_rhs,
    term1_estimate,
    term2_estimate,
    theorem_bound,
)
from fedgen.core import RunConfig, Schedule
from fedgen.distributions import Finite, FiniteDistribution
from fedgen.engine import centralized_sgd_arrays
from fedgen.errors import NoisyRunUnsupportedError, WrongRError
from fedgen.losses import SQUARED_LOCATION
from fedgen.oracle import OracleSetup, exact_modified_model, exact_term1, exact_term2


def finite_mu(points):
    return Finite(FiniteDistribution.uniform_locations(np.asarray(points, float)))


def config_for(n, K, R, eta, seed=0):
    return RunConfig(
        n=n, K=K, schedule=Schedule.constant(R, n // R, eta), w0=np.zeros(1),
        loss="squared_location", seed=seed,
    )


class TestBCoefficient:
    def test_direct_series_value(self):
        # independent oracle: sum the defining series directly
        sched = Schedule.constant(2, 5, 0.01)
        L = 2.0
        expected = 0.0
        prod = 1.0
        for _ in range(5):
            expected += 0.01 * prod
            prod *= 1.0 + L * 0.01
        got = b_coefficient(sched, 1, L)
        assert got == pytest.approx(expected, abs=1e-15)
        assert abs(got - 0.052040402) <= 1e-9

    def test_last_round_is_zero(self):
        sched = Schedule.constant(3, 2, 0.1)
        assert b_coefficient(sched, 3, 2.0) == 0.0

    def test_monotone_decreasing_tail(self):
        rng = np.random.default_rng(0)
        sched = Schedule(rng.uniform(0.01, 0.2, size=(4, 3)))
        vals = [b_coefficient(sched, r, 2.0) for r in range(1, 5)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] == 0.0


class TestModifiedSgd:
    def test_round1_is_plain_sgd(self):
        config = config_for(n=2, K=2, R=2, eta=0.3)
        mu = finite_mu([[0.0], [1.0]])
        block = np.array([[1.0]])
        spec = ModifiedSgdSpec(r=1, k=1, m_inner=8, block_features=block)
        model = modified_sgd_model(spec, config, mu, SQUARED_LOCATION)
        direct = centralized_sgd_arrays(
            config.w0, block, None, config.schedule.rates(1), SQUARED_LOCATION
        )
        assert np.array_equal(model, direct)

    def test_round1_init_mode_returns_w0(self):
        config = config_for(n=2, K=2, R=2, eta=0.3)
        mu = finite_mu([[0.0], [1.0]])
        spec = ModifiedSgdSpec(r=1, k=1, m_inner=1, block_features=np.array([[1.0]]))
        model = modified_sgd_model(spec, config, mu, SQUARED_LOCATION, a_prime_r1="init")
        assert np.array_equal(model, config.w0)

    def test_converges_to_exact_enumeration(self):
        config = config_for(n=2, K=2, R=2, eta=0.3, seed=11)
        mu = finite_mu([[0.0], [1.0]])
        block = np.array([[1.0]])
        setup = OracleSetup(mu.dist, K=2, schedule=config.schedule, w0=config.w0)
        exact = exact_modified_model(setup, 2, block)
        reps = []
        for rep in range(64):
            spec = ModifiedSgdSpec(r=2, k=1, m_inner=8, block_features=block, replicate=rep)
            reps.append(modified_sgd_model(spec, config, mu, SQUARED_LOCATION)[0])
        se = np.std(reps, ddof=1) / np.sqrt(len(reps))
        assert abs(np.mean(reps) - exact[0]) <= 3 * se


class TestTerm1:
    def test_tiny_instance_value(self, tiny_config, tiny_mu):
        est, parts = term1_estimate(tiny_config, tiny_mu, SQUARED_LOCATION, 400, 1)
        assert abs(est.mean - 0.25) <= 3 * est.se
        assert set(parts) == {(1, 1), (2, 1)}

    def test_singleton_support_zero(self):
        config = config_for(n=2, K=2, R=2, eta=0.2)
        mu = finite_mu([[1.0]])
        est, _ = term1_estimate(config, mu, SQUARED_LOCATION, 32, 4)
        assert est.mean == 0.0

    def test_deterministic(self, tiny_config, tiny_mu):
        a = term1_estimate(tiny_config, tiny_mu, SQUARED_LOCATION, 50, 2)
        b = term1_estimate(tiny_config, tiny_mu, SQUARED_LOCATION, 50, 2)
        assert a[0] == b[0] and a[1] == b[1]


class TestTerm2:
    def test_r1_empty(self, tiny_config, tiny_mu):
        est, rounds, kr = term2_estimate(tiny_config, tiny_mu, SQUARED_LOCATION, 20)
        assert (est.mean, est.se) == (0.0, 0.0)
        assert rounds == {}

    def test_degenerate_support_zero(self):
        config = config_for(n=2, K=2, R=2, eta=0.2)
        mu = finite_mu([[1.0]])  # ghost always equals the sample it replaces
        est, rounds, _ = term2_estimate(config, mu, SQUARED_LOCATION, 25, full_sum=True)
        assert est.mean == 0.0
        assert rounds[1].mean == 0.0

    def test_full_sum_matches_sampled_in_expectation(self):
        config = config_for(n=2, K=2, R=2, eta=0.35, seed=5)
        mu = finite_mu([[0.0], [1.0]])
        full, _, _ = term2_estimate(config, mu, SQUARED_LOCATION, 800, full_sum=True)
        sampled, _, _ = term2_estimate(config, mu, SQUARED_LOCATION, 800, full_sum=False)
        tol = 3 * np.hypot(full.se, sampled.se)
        assert abs(full.mean - sampled.mean) <= tol


class TestMCvsExact:
    def test_term1_and_term2_match_enumeration(self):
        config = config_for(n=2, K=2, R=2, eta=0.35, seed=2)
        mu = finite_mu([[0.0], [1.0]])
        setup = OracleSetup(mu.dist, K=2, schedule=config.schedule, w0=config.w0)

        t1, _ = term1_estimate(config, mu, SQUARED_LOCATION, 600, 16)
        assert abs(t1.mean - exact_term1(setup)) <= 3 * t1.se

        t2, _, _ = term2_estimate(config, mu, SQUARED_LOCATION, 600, full_sum=True)
        assert abs(t2.mean - exact_term2(setup)) <= 3 * t2.se


class TestTheoremBound:
    def test_tiny_breakdown(self, tiny_config, tiny_mu):
        bd = theorem_bound(tiny_config, tiny_mu, SQUARED_LOCATION, 400, 1, 400)
        assert bd.term2_total.mean == 0.0
        assert abs(bd.total.mean - 0.25) <= 3 * bd.total.se
        assert bd.b_coefficients[2] == 0.0  # b_{R+1} with R = 1

    def test_breakdown_recomposes(self):
        config = config_for(n=2, K=2, R=2, eta=0.3, seed=8)
        mu = finite_mu([[0.0], [1.0]])
        bd = theorem_bound(config, mu, SQUARED_LOCATION, 60, 4, 60, full_term2=True)
        assert bd.recomputed_total(config) == pytest.approx(bd.total.mean, abs=1e-12)
        assert set(bd.term2_kr_parts) == {(1, 1), (2, 1)}

    def test_r1_total_equals_one_shot_bitwise(self, tiny_config, tiny_mu):
        bd = theorem_bound(tiny_config, tiny_mu, SQUARED_LOCATION, 120, 32, 120)
        rhs = one_shot_rhs(tiny_config, tiny_mu, SQUARED_LOCATION, 120)
        assert bd.total == rhs

    def test_rejects_noise(self, tiny_mu):
        config = RunConfig(
            n=1, K=2, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1),
            loss="squared_location", noise_sigma=0.1,
        )
        with pytest.raises(NoisyRunUnsupportedError):
            theorem_bound(config, tiny_mu, SQUARED_LOCATION, 8, 1, 8)

    def test_smoothness_override_scales_term2(self):
        mu = finite_mu([[0.0], [1.0]])
        base = config_for(n=2, K=2, R=2, eta=0.3, seed=13)
        boosted = RunConfig(
            n=2, K=2, schedule=base.schedule, w0=base.w0, loss=base.loss,
            seed=13, smoothness=5.0,
        )
        a = theorem_bound(base, mu, SQUARED_LOCATION, 40, 4, 40)
        b = theorem_bound(boosted, mu, SQUARED_LOCATION, 40, 4, 40)
        assert b.L == 5.0
        assert b.term2_total.mean > a.term2_total.mean

    def test_singleton_support_total_zero(self):
        config = config_for(n=2, K=2, R=2, eta=0.2)
        mu = finite_mu([[1.0]])
        bd = theorem_bound(config, mu, SQUARED_LOCATION, 16, 2, 16)
        assert bd.total.mean == 0.0


class TestOneShot:
    def test_wrong_r(self, tiny_mu):
        config = config_for(n=2, K=2, R=2, eta=0.2)
        with pytest.raises(WrongRError):
            one_shot_rhs(config, tiny_mu, SQUARED_LOCATION, 8)

    def test_tiny_value(self, tiny_config, tiny_mu):
        est = one_shot_rhs(tiny_config, tiny_mu, SQUARED_LOCATION, 400)
        assert abs(est.mean - 0.25) <= 3 * est.se

    def test_k1_is_plain_expected_gen_of_solo_sgd(self):
        mu = finite_mu([[0.0], [1.0]])
        config = config_for(n=2, K=1, R=1, eta=0.3, seed=3)
        est = one_shot_rhs(config, mu, SQUARED_LOCATION, 800)
        # K = 1: prefactor 1, so this is the expected gen error of solo SGD
        setup = OracleSetup(mu.dist, K=1, schedule=config.schedule, w0=config.w0)
        from fedgen.oracle import exact_expected_gen

        assert abs(est.mean - exact_expected_gen(setup)) <= 3 * est.se
