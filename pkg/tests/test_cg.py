import numpy as np
import pytest

from polarlens.errors import SolverError
from polarlens.utils.cg import cg_solve


def test_scaled_identity_solves_in_one_iteration(rng):
    b = rng.normal(size=(3, 4, 2, 2))
    result = cg_solve(lambda x: 2.0 * x, b, tol=1e-12)
    np.testing.assert_allclose(result.x, b / 2.0, atol=1e-15)
    assert result.iterations == 1


def test_zero_rhs_returns_zero_immediately():
    calls = []
    result = cg_solve(lambda x: calls.append(1) or x, np.zeros((2, 2)))
    assert not np.any(result.x)
    assert result.iterations == 0
    assert not calls


def test_dense_spd_system(rng):
    m = rng.normal(size=(20, 20))
    matrix = m @ m.T + 0.5 * np.eye(20)
    b = rng.normal(size=20)
    result = cg_solve(lambda x: matrix @ x, b, tol=1e-10, max_iters=200)
    np.testing.assert_allclose(result.x, np.linalg.solve(matrix, b), atol=1e-8)
    assert result.residual <= 1e-10


def test_warm_start_at_solution_does_no_work(rng):
    matrix = np.diag(rng.uniform(1.0, 2.0, size=8))
    b = rng.normal(size=8)
    exact = np.linalg.solve(matrix, b)
    result = cg_solve(lambda x: matrix @ x, b, x0=exact, tol=1e-8)
    assert result.iterations == 0


def test_iteration_cap_is_respected(rng):
    matrix = np.diag(np.linspace(1.0, 1e4, 50))
    result = cg_solve(lambda x: matrix @ x, rng.normal(size=50), tol=1e-14, max_iters=5)
    assert result.iterations == 5
    assert result.residual > 1e-14


def test_negative_curvature_is_reported():
    with pytest.raises(SolverError) as info:
        cg_solve(lambda x: -x, np.ones(4))
    assert info.value.iteration == 1
