import numpy as np
import pytest

from fedgen.distributions import (
    Empirical,
    Finite,
    FiniteDistribution,
    Friedman1,
    GaussianLinear,
    GaussianLocation,
    closed_form_population_risk,
    draw,
    friedman1_response,
)
from fedgen.errors import DomainError, FamilyMismatchError
from fedgen.losses import OLS_REGRESSION, SQUARED_LOCATION
from fedgen.rng import derive_stream


class TestDraw:
    def test_empty(self):
        mu = GaussianLocation(np.zeros(2), 1.0)
        assert draw(mu, derive_stream(0, "d"), 0) == []

    def test_deterministic(self):
        mu = GaussianLocation(np.zeros(2), 1.0)
        a = draw(mu, derive_stream(0, "d"), 5)
        b = draw(mu, derive_stream(0, "d"), 5)
        assert all(np.array_equal(x.features, y.features) for x, y in zip(a, b))

    def test_location_mean_clt(self):
        mu = GaussianLocation(np.zeros(2), 1.0)
        feats, _ = mu.draw_arrays(derive_stream(1, "clt").generator(), 100_000)
        tol = 4.0 / np.sqrt(100_000)
        assert np.all(np.abs(feats.mean(axis=0)) <= tol)

    def test_finite_frequencies(self):
        dist = FiniteDistribution(
            FiniteDistribution.uniform_locations([[0.0], [1.0], [2.0]]).samples,
            np.array([0.2, 0.3, 0.5]),
        )
        mu = Finite(dist)
        feats, _ = mu.draw_arrays(derive_stream(2, "freq").generator(), 100_000)
        for point, p in zip((0.0, 1.0, 2.0), (0.2, 0.3, 0.5)):
            freq = float(np.mean(feats[:, 0] == point))
            assert abs(freq - p) <= 5 * np.sqrt(p * (1 - p) / 100_000)


class TestClosedForms:
    def test_gaussian_location(self):
        mu = GaussianLocation(np.zeros(2), 1.0)
        assert closed_form_population_risk(mu, np.zeros(2), SQUARED_LOCATION) == 2.0

    def test_gaussian_linear(self):
        mu = GaussianLinear(np.array([2.0, -1.0]), 0.1)
        val = closed_form_population_risk(mu, np.array([2.0, -1.0]), OLS_REGRESSION)
        assert val == pytest.approx(0.01)

    def test_friedman_unavailable(self):
        assert closed_form_population_risk(Friedman1(), np.zeros(10), OLS_REGRESSION) is None

    def test_family_mismatch(self):
        with pytest.raises(FamilyMismatchError):
            closed_form_population_risk(Friedman1(), np.zeros(10), SQUARED_LOCATION)

    @pytest.mark.parametrize(
        "mu",
        [
            GaussianLocation(np.array([0.5, -1.0]), 0.7),
            GaussianLinear(np.array([1.0, 2.0, -0.5]), 0.3),
            Finite(
                FiniteDistribution(
                    FiniteDistribution.uniform_locations([[0.0, 1.0], [2.0, -1.0]]).samples,
                    np.array([0.4, 0.6]),
                )
            ),
        ],
    )
    def test_closed_form_matches_mc(self, mu):
        family = SQUARED_LOCATION if mu.kind == "location" else OLS_REGRESSION
        gen_w = np.random.default_rng(7)
        for trial in range(20):
            w = gen_w.normal(size=mu.dim)
            exact = closed_form_population_risk(mu, w, family)
            feats, labels = mu.draw_arrays(derive_stream(3, "cfmc", trial).generator(), 100_000)
            losses = family.loss_vector(feats, labels, w)
            se = losses.std(ddof=1) / np.sqrt(losses.size)
            assert abs(losses.mean() - exact) <= 4 * se


class TestFriedman1:
    def test_hand_values(self):
        assert friedman1_response(np.zeros(10)) == pytest.approx(5.0)
        x = np.zeros(10)
        x[0], x[1], x[2] = 0.5, 1.0, 0.5
        assert friedman1_response(x) == pytest.approx(10.0)

    def test_all_terms_vanish(self):
        x = np.zeros(10)
        x[2] = 0.5
        assert friedman1_response(x) == pytest.approx(0.0)

    def test_domain(self):
        x = np.zeros(10)
        x[0] = 1.5
        with pytest.raises(DomainError):
            friedman1_response(x)

    def test_features_in_unit_cube(self):
        feats, _ = Friedman1().draw_arrays(derive_stream(4, "f1").generator(), 10_000)
        assert feats.min() >= 0.0 and feats.max() <= 1.0

    def test_tail_coordinates_do_not_matter(self):
        mu = Friedman1(noise_sigma=0.0)
        feats, labels = mu.draw_arrays(derive_stream(5, "f1b").generator(), 500)
        shuffled = feats.copy()
        shuffled[:, 5:] = shuffled[::-1, 5:]  # permute coordinates 6..10 across rows
        relabeled = np.array([friedman1_response(row) for row in shuffled])
        assert np.allclose(relabeled, labels)


class TestEmpirical:
    def test_split_is_disjoint_and_deterministic(self):
        pool = np.arange(20, dtype=float).reshape(-1, 2)
        a = Empirical.from_pool(pool, None, derive_stream(0, "split"))
        b = Empirical.from_pool(pool, None, derive_stream(0, "split"))
        assert np.array_equal(a.train_features, b.train_features)
        train_rows = {tuple(r) for r in a.train_features}
        eval_rows = {tuple(r) for r in a.eval_features}
        assert not train_rows & eval_rows
        assert len(train_rows) + len(eval_rows) == 10

    def test_draws_come_from_train_half(self):
        pool = np.arange(40, dtype=float).reshape(-1, 2)
        mu = Empirical.from_pool(pool, None, derive_stream(1, "split"))
        feats, _ = mu.draw_arrays(derive_stream(2, "draws").generator(), 200)
        train_rows = {tuple(r) for r in mu.train_features}
        assert all(tuple(r) in train_rows for r in feats)
        test_feats, _ = mu.test_arrays(derive_stream(3, "t").generator(), 200)
        eval_rows = {tuple(r) for r in mu.eval_features}
        assert all(tuple(r) in eval_rows for r in test_feats)
