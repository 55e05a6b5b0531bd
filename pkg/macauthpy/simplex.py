"""Dense two-phase tableau simplex for  min c^T x  s.t.  A x = b, x >= 0.

Bland's rule (lowest-index entering column, lowest-index leaving basic variable on ratio
ties) precludes cycling. The phase-one basis is cached so the same polytope can be
re-optimised for many cost vectors, which is how Frank-Wolfe uses it.
"""
from dataclasses import dataclass
from enum import Enum
import logging
from typing import List, Optional, Tuple
import numpy as np

from macauthpy.constants import FEASIBILITY_TOL, LP_MAX_PIVOTS, PIVOT_TOL
from macauthpy.errors import DimensionMismatchError, LinearProgramError

logger = logging.getLogger(__name__)


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray]
    objective: float
    infeasibility: float  # phase-one optimum: total artificial mass
    pivots: int

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])


class DenseSimplex(object):
    def __init__(
        self,
        a_eq: np.ndarray,
        b_eq: np.ndarray,
        tol: float = PIVOT_TOL,
        feasibility_tol: float = FEASIBILITY_TOL,
        max_pivots: int = LP_MAX_PIVOTS,
    ) -> None:
        self.a = np.array(a_eq, dtype=float)
        self.b = np.array(b_eq, dtype=float).ravel()
        if self.a.ndim != 2 or self.a.shape[0] != self.b.size:
            raise DimensionMismatchError(
                f"constraint matrix {self.a.shape} does not match rhs of size {self.b.size}"
            )
        self.tol = tol
        self.feasibility_tol = feasibility_tol
        self.max_pivots = max_pivots
        self.__phase_one: Optional[Tuple[np.ndarray, List[int], float, int]] = None

    @property
    def num_vars(self) -> int:
        return int(self.a.shape[1])

    def _iterate(self, tableau: np.ndarray, basis: List[int], num_cols: int) -> Tuple[LpStatus, int]:
        m = len(basis)
        for pivots in range(self.max_pivots):
            entering = np.flatnonzero(tableau[m, :num_cols] < -self.tol)
            if entering.size == 0:
                return LpStatus.OPTIMAL, pivots
            col = int(entering[0])
            column = tableau[:m, col]
            candidates = np.flatnonzero(column > self.tol)
            if candidates.size == 0:
                return LpStatus.UNBOUNDED, pivots
            ratios = tableau[candidates, -1] / column[candidates]
            best = ratios.min()
            ties = candidates[ratios <= best + self.tol]
            row = int(min(ties, key=lambda r: basis[r]))
            _pivot(tableau, row, col)
            basis[row] = col
        raise LinearProgramError(f"simplex exceeded {self.max_pivots} pivots")

    def _phase_one(self) -> Tuple[np.ndarray, List[int], float, int]:
        if self.__phase_one is not None:
            return self.__phase_one
        a = self.a.copy()
        b = self.b.copy()
        flip = b < 0
        a[flip] *= -1.0
        b[flip] *= -1.0
        m, n = a.shape
        tableau = np.zeros((m + 1, n + m + 1))
        tableau[:m, :n] = a
        tableau[:m, n : n + m] = np.eye(m)
        tableau[:m, -1] = b
        tableau[m, :n] = -a.sum(axis=0)
        tableau[m, -1] = -b.sum()
        basis = list(range(n, n + m))
        status, pivots = self._iterate(tableau, basis, n + m)
        if status != LpStatus.OPTIMAL:
            raise LinearProgramError(f"phase one ended {status.value}")
        infeasibility = max(-float(tableau[m, -1]), 0.0)

        # drive zero-level artificials out of the basis; rows with no pivot are redundant
        for row, var in enumerate(basis):
            if var < n:
                continue
            nonzero = np.flatnonzero(np.abs(tableau[row, :n]) > self.tol)
            if nonzero.size > 0:
                _pivot(tableau, row, int(nonzero[0]))
                basis[row] = int(nonzero[0])
                pivots += 1
        tableau[:m, -1] = np.clip(tableau[:m, -1], 0.0, None)
        logger.debug("phase one: infeasibility %.3g after %d pivots", infeasibility, pivots)
        self.__phase_one = (tableau[:m].copy(), list(basis), infeasibility, pivots)
        return self.__phase_one

    def is_feasible(self) -> bool:
        return self._phase_one()[2] <= self.feasibility_tol

    def solve(self, c: np.ndarray) -> LpSolution:
        c = np.asarray(c, dtype=float).ravel()
        if c.size != self.num_vars:
            raise DimensionMismatchError(f"cost vector has {c.size} entries, expected {self.num_vars}")
        rows, basis, infeasibility, phase_one_pivots = self._phase_one()
        if infeasibility > self.feasibility_tol:
            return LpSolution(LpStatus.INFEASIBLE, None, float("inf"), infeasibility, phase_one_pivots)

        m, n = rows.shape[0], self.num_vars
        basis = list(basis)
        tableau = np.zeros((m + 1, rows.shape[1]))
        tableau[:m] = rows
        cost = np.zeros(rows.shape[1] - 1)
        cost[:n] = c
        basic_cost = np.array([cost[var] for var in basis])
        tableau[m, :-1] = cost - basic_cost @ rows[:, :-1]
        tableau[m, -1] = -float(basic_cost @ rows[:, -1])
        status, pivots = self._iterate(tableau, basis, n)

        x = np.zeros(n)
        for row, var in enumerate(basis):
            if var < n:
                x[var] = tableau[row, -1]
        x = np.clip(x, 0.0, None)
        return LpSolution(
            status,
            x if status == LpStatus.OPTIMAL else None,
            float(c @ x) if status == LpStatus.OPTIMAL else float("-inf"),
            infeasibility,
            phase_one_pivots + pivots,
        )


def linprog_eq(c: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray) -> LpSolution:
    """One-shot convenience wrapper."""
    return DenseSimplex(a_eq, b_eq).solve(c)
