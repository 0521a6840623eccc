import numpy as np
import pytest

from fedgen.core import Schedule
from fedgen.distributions import FiniteDistribution
from fedgen.errors import TooLargeError, WrongShapeError
from fedgen.oracle import (
    IDENTITY_TOL,
    OracleSetup,
    check_identity,
    check_inequality,
    enumerate_expectation,
)
from fedgen.verify import cq_zero_setups, hand_setups, randomized_setups, run_suite


def uniform(points):
    return FiniteDistribution.uniform_locations(np.asarray(points, float))


class TestEnumerate:
    def test_constant_functional(self):
        dist = uniform([[0.0], [1.0], [2.0]])
        val = enumerate_expectation(dist, 2, 2, lambda data: 3.5)
        assert val == pytest.approx(3.5, abs=1e-12)

    def test_indicator_gives_probability(self):
        dist = FiniteDistribution(
            uniform([[0.0], [1.0]]).samples, np.array([0.25, 0.75])
        )

        def indicator(data):
            return float(np.all(data.features == 1.0))

        # all four draws equal to the second point: 0.75^4
        val = enumerate_expectation(dist, 2, 2, indicator)
        assert val == pytest.approx(0.75**4, abs=1e-12)

    def test_hand_expected_gen(self, uniform01):
        from fedgen.oracle import exact_expected_gen

        setup = OracleSetup(uniform01, K=2, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1))
        assert exact_expected_gen(setup) == pytest.approx(0.25, abs=1e-12)

    def test_guard(self):
        dist = uniform([[float(i)] for i in range(10)])
        with pytest.raises(TooLargeError):
            enumerate_expectation(dist, 4, 2, lambda data: 0.0)

    def test_ghost_marginal(self, uniform01):
        # E over (S, S') of the mean ghost coordinate is the support mean
        val = enumerate_expectation(
            uniform01, 1, 2, lambda data, ghost: float(ghost.features.mean()), with_ghosts=True
        )
        assert val == pytest.approx(0.5, abs=1e-12)


class TestHandCases:
    def test_leave_one_out_hand(self, uniform01):
        setup = OracleSetup(uniform01, K=1, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1))
        rep = check_identity("leave_one_out", setup)
        assert rep.lhs == pytest.approx(0.5, abs=1e-12)
        assert rep.rhs == pytest.approx(0.5, abs=1e-12)

    def test_corollary_hand(self, uniform01):
        setup = OracleSetup(uniform01, K=2, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1))
        rep = check_identity("corollary_one_shot", setup)
        assert (rep.lhs, rep.rhs) == (0.25, 0.25)

    def test_theorem_tight_at_r1(self, uniform01):
        setup = OracleSetup(uniform01, K=2, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1))
        rep = check_inequality("theorem", setup)
        assert (rep.lhs, rep.rhs) == (0.25, 0.25)
        assert abs(rep.slack) <= 1e-12

    def test_singleton_support_degenerate(self):
        setup = OracleSetup(
            uniform([[1.0]]), K=2, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1)
        )
        rep = check_identity("corollary_one_shot", setup)
        assert (rep.lhs, rep.rhs) == (0.0, 0.0)

    def test_zero_like_rates_no_learning_no_gap(self, uniform01):
        # strictly positive but vanishing rates: both theorem sides collapse to
        # the data-independent-model gap, which is zero in expectation
        setup = OracleSetup(
            uniform01, K=2, schedule=Schedule.constant(2, 1, 1e-300), w0=np.zeros(1)
        )
        rep = check_inequality("theorem", setup)
        assert rep.lhs == pytest.approx(0.0, abs=1e-12)
        assert rep.rhs == pytest.approx(0.0, abs=1e-12)


class TestShapes:
    def test_wrong_r_for_r2_checks(self, uniform01):
        setup = OracleSetup(uniform01, K=2, schedule=Schedule.constant(1, 2, 0.3), w0=np.zeros(1))
        for which in ("term_a", "term_b2", "decomp_r2"):
            with pytest.raises(WrongShapeError):
                check_identity(which, setup)
        with pytest.raises(WrongShapeError):
            check_inequality("term_b1", setup)

    def test_cq_zero_needs_r3(self, uniform01):
        setup = OracleSetup(uniform01, K=2, schedule=Schedule.constant(2, 1, 0.3), w0=np.zeros(1))
        with pytest.raises(WrongShapeError):
            check_identity("cq_zero", setup)

    def test_regression_support_rejected(self):
        from fedgen.core import regression_sample

        dist = FiniteDistribution(
            (regression_sample([0.0], 0.0), regression_sample([1.0], 1.0)),
            np.array([0.5, 0.5]),
        )
        with pytest.raises(WrongShapeError):
            OracleSetup(dist, K=1, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1))

    def test_unknown_check_names(self, uniform01):
        setup = OracleSetup(uniform01, K=1, schedule=Schedule.constant(1, 1, 0.5), w0=np.zeros(1))
        with pytest.raises(WrongShapeError):
            check_identity("nope", setup)
        with pytest.raises(WrongShapeError):
            check_inequality("nope", setup)


class TestSuite:
    def test_randomized_suite_passes(self):
        results = run_suite()
        assert len([r for r in results if not r.passed]) == 0
        # identity agreement within 1e-10 and inequality slack above -1e-10
        for r in results:
            if r.report.kind == "identity":
                assert abs(r.report.lhs - r.report.rhs) <= IDENTITY_TOL
            else:
                assert r.report.slack >= -IDENTITY_TOL

    def test_suite_composition(self):
        assert len(randomized_setups()) >= 20
        for _, setup in randomized_setups():
            assert setup.K <= 3 and setup.n <= 4 and setup.R <= 2
            assert setup.dist.size <= 3
        assert len(hand_setups()) == 3
        assert len(cq_zero_setups()) >= 2

    def test_perturbed_aggregation_fails_corollary(self):
        results = run_suite(perturb_aggregation=1e-3)
        corollary = [r for r in results if r.label.startswith("corollary_one_shot")]
        assert any(not r.passed for r in corollary)
