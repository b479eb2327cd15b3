import math

import numpy as np
import pytest

from lifrbf import rbf
from lifrbf.errors import InvalidInputError

import oracles


@pytest.fixture
def model2d():
    rng = np.random.default_rng(42)
    centers = rng.uniform(-1, 1, size=(4, 2))
    widths = rng.uniform(0.5, 1.5, size=4)
    weights = rng.normal(size=5)
    return rbf.RbfModel(centers, widths, weights)


class TestFeatureMap:
    def test_at_center(self):
        m = rbf.RbfModel([[0.3, -0.2]], [0.7], [0.0, 1.0])
        phi = rbf.feature_map(m, [[0.3, -0.2]])
        assert phi[0, 0] == 1.0 and phi[0, 1] == 1.0

    def test_one_width_away(self):
        m = rbf.RbfModel([[0.0]], [2.0], [0.0, 1.0])
        assert rbf.feature_map(m, [2.0])[0, 1] == pytest.approx(0.36787944117144233, rel=1e-15)

    def test_scalar_oracle(self, model2d):
        X = np.random.default_rng(1).uniform(-2, 2, size=(25, 2))
        phi = rbf.feature_map(model2d, X)
        for i, x in enumerate(X):
            for j in range(4):
                ref = oracles.gaussian(x, model2d.centers[j], model2d.widths[j])
                assert phi[i, j + 1] == pytest.approx(ref, rel=1e-13, abs=1e-300)
        assert np.all(phi[:, 0] == 1.0)
        assert np.all((phi > 0) & (phi <= 1))

    def test_dimension_mismatch(self, model2d):
        with pytest.raises(InvalidInputError):
            rbf.feature_map(model2d, np.zeros((3, 3)))


class TestFeatureDerivative:
    def test_zero_at_center(self):
        m = rbf.RbfModel([[0.5, 0.5]], [1.0], [0.0, 1.0])
        assert rbf.feature_map_derivative(m, [[0.5, 0.5]], 1)[0, 1] == 0.0

    def test_closed_form(self):
        m = rbf.RbfModel([[0.0]], [1.0], [0.0, 1.0])
        d = rbf.feature_map_derivative(m, [1.0], 0)
        assert d[0, 0] == 0.0
        assert d[0, 1] == pytest.approx(-0.7357588823428847, rel=1e-15)

    def test_finite_difference_1000_points(self, model2d):
        X = np.random.default_rng(2).uniform(-2, 2, size=(1000, 2))
        for k in (0, 1):
            d = rbf.feature_map_derivative(model2d, X, k)
            h = np.zeros(2)
            h[k] = 1e-6
            fd = (rbf.feature_map(model2d, X + h) - rbf.feature_map(model2d, X - h)) / 2e-6
            assert np.max(np.abs(d - fd)) <= 1e-6

    def test_axis_out_of_range(self, model2d):
        with pytest.raises(InvalidInputError):
            rbf.feature_map_derivative(model2d, np.zeros((1, 2)), 2)


class TestPredict:
    def test_zero_weights(self, model2d):
        m = model2d.with_weights(np.zeros(5))
        assert np.all(rbf.predict(m, np.ones((3, 2))) == 0.0)

    def test_bias_only(self, model2d):
        m = model2d.with_weights([2.5, 0, 0, 0, 0])
        np.testing.assert_array_equal(rbf.predict(m, np.ones((3, 2))), 2.5)

    def test_scalar_summation(self, model2d):
        X = np.random.default_rng(3).uniform(-1, 1, size=(20, 2))
        ref = [oracles.network(model2d.weights, x, model2d.centers, model2d.widths) for x in X]
        np.testing.assert_allclose(rbf.predict(model2d, X), ref, rtol=0, atol=1e-12)

    def test_linear_in_weights(self, model2d):
        X = np.random.default_rng(4).uniform(-1, 1, size=(20, 2))
        w1, w2 = np.random.default_rng(5).normal(size=(2, 5))
        lhs = rbf.predict(model2d.with_weights(w1 + w2), X)
        rhs = rbf.predict(model2d.with_weights(w1), X) + rbf.predict(model2d.with_weights(w2), X)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestInitCenters:
    def test_uniform_grid(self):
        X = np.linspace(-10, 10, 30)[:, None]
        m = rbf.init_centers(X, 11, rbf.CenterPolicy("uniform-grid", sigma=1.0))
        np.testing.assert_allclose(m.centers[:, 0], np.arange(-10, 11, 2), atol=1e-12)
        assert np.all(m.weights == 0)

    def test_kmeans_degenerate(self):
        X = np.array([[3.0], [1.0], [2.0], [1.0]])
        m = rbf.init_centers(X, 4, rbf.CenterPolicy("k-means"))
        np.testing.assert_array_equal(m.centers[:, 0], [1.0, 2.0, 3.0])

    def test_kmeans_deterministic(self):
        X = np.random.default_rng(0).normal(size=(50, 2))
        a = rbf.init_centers(X, 6, seed=3)
        b = rbf.init_centers(X, 6, seed=3)
        np.testing.assert_array_equal(a.centers, b.centers)
        assert np.all(a.widths > 0)

    def test_nearest_neighbor_widths(self):
        X = np.linspace(-10, 10, 30)[:, None]
        pol = rbf.CenterPolicy("uniform-grid", width_rule="nearest-neighbor", factor=2.0)
        m = rbf.init_centers(X, 11, pol)
        # recompute nearest-neighbor distances directly
        c = m.centers[:, 0]
        nn = [min(abs(c[i] - c[j]) for j in range(len(c)) if j != i) for i in range(len(c))]
        np.testing.assert_allclose(m.widths, 2.0 * np.array(nn))
        np.testing.assert_allclose(m.widths, 4.0)

    def test_sample_subset(self):
        X = np.arange(10.0)[:, None]
        m = rbf.init_centers(X, 4, rbf.CenterPolicy("sample-subset"), seed=1)
        assert set(m.centers[:, 0]) <= set(X[:, 0])
        assert len(set(m.centers[:, 0])) == 4

    @pytest.mark.parametrize("kind", ["k-means", "sample-subset"])
    def test_too_many_centers(self, kind):
        with pytest.raises(InvalidInputError):
            rbf.init_centers(np.zeros((3, 1)), 4, rbf.CenterPolicy(kind))


class TestFitUnconstrained:
    def test_constant_targets(self):
        X = np.linspace(0, 1, 15)[:, None]
        base = rbf.init_centers(X, 4, rbf.CenterPolicy("uniform-grid", sigma=0.3))
        m = rbf.fit_unconstrained(X, np.full(15, 1.7), base)
        assert np.mean((rbf.predict(m, X) - 1.7) ** 2) < 1e-20

    def test_square_interpolation(self):
        X = np.linspace(0, 1, 5)[:, None]
        base = rbf.RbfModel(X[:4], np.full(4, 0.4), np.zeros(5))
        y = np.sin(3 * X[:, 0])
        m = rbf.fit_unconstrained(X, y, base)
        assert np.mean((rbf.predict(m, X) - y) ** 2) < 1e-16

    def test_global_minimum(self):
        rng = np.random.default_rng(8)
        X = rng.uniform(-3, 3, size=(40, 1))
        y = np.sin(X[:, 0]) + 0.05 * rng.normal(size=40)
        base = rbf.init_centers(X, 6, rbf.CenterPolicy(sigma=1.2), seed=0)
        m = rbf.fit_unconstrained(X, y, base)
        loss = lambda w: np.sum((y - rbf.predict(base.with_weights(w), X)) ** 2)
        best = loss(m.weights)
        for _ in range(100):
            assert best <= loss(m.weights + rng.normal(scale=1e-3, size=7)) + 1e-12


class TestSerialization:
    def test_round_trip(self, model2d, tmp_path):
        path = tmp_path / "m.txt"
        rbf.save_model(model2d, path)
        first = path.read_text().splitlines()[0]
        assert first == "4 2"
        back = rbf.load_model(path)
        np.testing.assert_array_equal(back.centers, model2d.centers)
        np.testing.assert_array_equal(back.widths, model2d.widths)
        np.testing.assert_array_equal(back.weights, model2d.weights)


def test_model_invariants():
    with pytest.raises(InvalidInputError):
        rbf.RbfModel([[0.0]], [0.0], [0.0, 0.0])
    with pytest.raises(InvalidInputError):
        rbf.RbfModel([[0.0]], [1.0], [0.0])
    assert math.isclose(rbf.RbfModel([[0.0]], [1.0], [0.0, 0.0]).widths[0], 1.0)
