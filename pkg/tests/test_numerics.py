import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifrbf import numerics
from lifrbf.errors import InvalidInputError

import oracles


def penrose_errors(a, ap):
    scale = max(1.0, np.max(np.abs(a)))
    return [
        np.max(np.abs(a @ ap @ a - a)) / scale,
        np.max(np.abs(ap @ a @ ap - ap)) / max(1.0, np.max(np.abs(ap))),
        np.max(np.abs((a @ ap).T - a @ ap)),
        np.max(np.abs((ap @ a).T - ap @ a)),
    ]


class TestPseudoInverse:
    def test_identity(self):
        np.testing.assert_array_equal(numerics.pseudo_inverse(np.eye(3)), np.eye(3))

    def test_rank_deficient_diagonal(self):
        np.testing.assert_allclose(numerics.pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_random_4x2_penrose(self):
        a = np.random.default_rng(7).normal(size=(4, 2))
        assert max(penrose_errors(a, numerics.pseudo_inverse(a))) < 1e-8

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInputError):
            numerics.pseudo_inverse([[1.0, np.nan]])

    @settings(max_examples=60, deadline=None)
    @given(
        p=st.integers(1, 20),
        q=st.integers(1, 20),
        rank=st.integers(1, 20),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_penrose_identities_property(self, p, q, rank, seed):
        rng = np.random.default_rng(seed)
        r = min(rank, p, q)
        a = rng.normal(size=(p, r)) @ rng.normal(size=(r, q))
        assert max(penrose_errors(a, numerics.pseudo_inverse(a))) < 1e-8


class TestWeightedLeastSquares:
    def test_identity_design(self):
        np.testing.assert_allclose(numerics.weighted_least_squares(np.eye(2), [3, 5], [1, 1]), [3, 5])

    def test_zero_weight_row_ignored(self):
        w = numerics.weighted_least_squares([[1.0], [1.0]], [0.0, 2.0], [1.0, 0.0])
        assert w == pytest.approx([0.0], abs=1e-15)

    def test_matches_gradient_descent(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(5, 2))
        b = rng.normal(size=5)
        wts = rng.uniform(0.2, 2.0, size=5)

        def grad(w):
            return -2 * a.T @ (wts * (b - a @ w))

        step = 1.0 / (2 * np.linalg.eigvalsh(a.T @ (wts[:, None] * a)).max())
        ref = oracles.gradient_descent(grad, np.zeros(2), step)
        np.testing.assert_allclose(numerics.weighted_least_squares(a, b, wts), ref, atol=1e-6)

    def test_unit_weights_equal_plain_least_squares(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=(12, 4))
        b = rng.normal(size=12)
        plain = np.linalg.pinv(a.T @ a, rcond=1e-12) @ a.T @ b
        np.testing.assert_allclose(numerics.weighted_least_squares(a, b, np.ones(12)), plain, atol=1e-10)

    def test_rank_deficient_gives_min_norm(self):
        a = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        w = numerics.weighted_least_squares(a, [1.0, 2.0, 3.0], [1, 1, 1])
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            numerics.weighted_least_squares(np.eye(2), [1, 2, 3], [1, 1])

    def test_negative_weight(self):
        with pytest.raises(InvalidInputError):
            numerics.weighted_least_squares(np.eye(2), [1, 2], [1, -1])


class TestSolveKKT:
    def test_projection_onto_constraint(self):
        res = numerics.solve_kkt(np.eye(2), np.zeros(2), [[1.0, 0.0]], [1.0])
        np.testing.assert_allclose(res.weights, [1.0, 0.0], atol=1e-15)
        # stationarity: G w + A^T lam = rhs
        np.testing.assert_allclose(np.eye(2) @ res.weights + np.array([[1.0], [0.0]]) @ res.multipliers,
                                   np.zeros(2), atol=1e-14)
        assert not res.rank_deficient

    def test_matches_penalty_continuation(self):
        rng = np.random.default_rng(5)
        phi = rng.normal(size=(15, 3))
        y = rng.normal(size=15)
        c = rng.normal(size=(1, 3))
        d = np.array([0.7])
        res = numerics.solve_kkt(phi.T @ phi, phi.T @ y, c, d)
        ref = oracles.penalty_continuation(phi, y, c, d)
        np.testing.assert_allclose(res.weights, ref, atol=1e-5)

    def test_feasibility_and_optimality(self):
        rng = np.random.default_rng(9)
        phi = rng.normal(size=(20, 6))
        y = rng.normal(size=20)
        a = rng.normal(size=(2, 6))
        c = rng.normal(size=2)
        res = numerics.solve_kkt(phi.T @ phi, phi.T @ y, a, c)
        assert np.max(np.abs(a @ res.weights - c)) <= 1e-10 * max(1, np.max(np.abs(c)))
        obj = lambda w: np.sum((y - phi @ w) ** 2)
        _, _, vt = np.linalg.svd(a)
        null = vt[2:].T
        best = obj(res.weights)
        for _ in range(100):
            assert best <= obj(res.weights + null @ rng.normal(scale=0.1, size=4)) + 1e-12

    def test_redundant_constraints_flagged(self):
        res = numerics.solve_kkt(np.eye(3), np.zeros(3), [[1.0, 0, 0], [2.0, 0, 0]], [1.0, 2.0])
        assert res.rank_deficient
        np.testing.assert_allclose(res.weights, [1.0, 0, 0], atol=1e-12)

    def test_shape_errors(self):
        with pytest.raises(InvalidInputError):
            numerics.solve_kkt(np.eye(2), np.zeros(2), [[1.0, 0.0, 0.0]], [1.0])
