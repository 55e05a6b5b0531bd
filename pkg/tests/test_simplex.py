# to run: python -m pytest -s tests/test_simplex.py

import numpy as np
import pytest

from macauthpy.errors import DimensionMismatchError
from macauthpy.simplex import DenseSimplex, LpStatus, linprog_eq


def test_textbook_optimum() -> None:
    # max x1 + x2  s.t.  x1 + 2 x2 <= 4,  3 x1 + x2 <= 6
    a_eq = np.array([[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]])
    b_eq = np.array([4.0, 6.0])
    solution = linprog_eq(np.array([-1.0, -1.0, 0.0, 0.0]), a_eq, b_eq)
    assert solution.is_optimal
    assert solution.objective == pytest.approx(-2.8, abs=1e-12)
    assert np.allclose(solution.x[:2], [1.6, 1.2], atol=1e-12)
    assert np.allclose(a_eq @ solution.x, b_eq, atol=1e-12)


def test_infeasible() -> None:
    lp = DenseSimplex(np.array([[1.0, 1.0]]), np.array([-1.0]))
    assert not lp.is_feasible()
    solution = lp.solve(np.array([1.0, 1.0]))
    assert solution.status == LpStatus.INFEASIBLE
    assert solution.x is None
    assert solution.infeasibility == pytest.approx(1.0)


def test_unbounded() -> None:
    solution = linprog_eq(np.array([-1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([1.0]))
    assert solution.status == LpStatus.UNBOUNDED
    assert solution.x is None
    assert solution.objective == float("-inf")


def test_redundant_rows() -> None:
    a_eq = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
    solution = linprog_eq(np.array([1.0, 2.0]), a_eq, np.array([1.0, 1.0, 2.0]))
    assert solution.is_optimal
    assert np.allclose(solution.x, [1.0, 0.0])


def test_transport_problem() -> None:
    # supplies (0.3, 0.7), demands (0.5, 0.5); the demand rows repeat the total mass
    a_eq = np.array(
        [
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
        ]
    )
    b_eq = np.array([0.3, 0.7, 0.5, 0.5])
    solution = linprog_eq(np.array([1.0, 2.0, 3.0, 1.0]), a_eq, b_eq)
    assert solution.objective == pytest.approx(1.4, abs=1e-12)
    assert np.allclose(solution.x, [0.3, 0.0, 0.2, 0.5], atol=1e-12)


def test_cached_phase_one_serves_many_costs() -> None:
    rng = np.random.default_rng(0)
    size = 7
    lp = DenseSimplex(np.ones((1, size)), np.array([1.0]))
    assert lp.is_feasible()
    for _ in range(50):
        c = rng.normal(size=size)
        solution = lp.solve(c)
        fresh = linprog_eq(c, np.ones((1, size)), np.array([1.0]))
        assert solution.objective == pytest.approx(c.min(), abs=1e-12)
        assert solution.objective == pytest.approx(fresh.objective, abs=1e-12)
        assert solution.x[int(np.argmin(c))] == pytest.approx(1.0)


def test_dimension_mismatch() -> None:
    with pytest.raises(DimensionMismatchError):
        DenseSimplex(np.ones((2, 3)), np.array([1.0]))
    lp = DenseSimplex(np.ones((1, 3)), np.array([1.0]))
    with pytest.raises(DimensionMismatchError):
        lp.solve(np.ones(2))
