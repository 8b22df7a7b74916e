"""
Search node relaxations.
A node fixes witness extensions for some inputs. Its linear program is solved
in floating point by HiGHS; every bound used for pruning is then recomputed
exactly from the rounded dual, and the rational simplex settles the cases the
rounding cannot.

Columns: scope coefficients c (in [-1, 1]), tau, delta, and for the weight
objective one magnitude a_s >= |c_s| per scope. Every row reads row . v <= 0.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.optimize import linprog

from .config import SearchConfig
from .model import SearchProblem
from .simplex import LPSolution, LPStatus, RationalSimplex


GAP = "gap"
WEIGHT = "weight"

DUAL_SUPPORT = 1e-9


@dataclass(frozen=True)
class NodeSolution:
    status: LPStatus
    value: float = -math.inf
    point: np.ndarray | None = None
    duals: np.ndarray | None = None
    # rigorous upper bound on the objective
    bound: Fraction | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class NodeRelaxation:
    """Linear program of a search node for one objective"""

    def __init__(
        self,
        problem: SearchProblem,
        objective: str = GAP,
        gap_floor: Fraction | None = None,
        config: SearchConfig = None,
    ):
        if objective not in (GAP, WEIGHT):
            raise ValueError(f"Unknown relaxation objective '{objective}'")
        self.problem = problem
        self.objective_name = objective
        self.config = config or SearchConfig()
        self.logger = logging.getLogger(__name__)

        n = problem.num_scopes
        self.tau_column = n
        self.delta_column = n + 1
        width = n + 2 + (n if objective == WEIGHT else 0)
        self.width = width

        base = np.zeros((problem.num_assignments, width), dtype=np.int64)
        base[:, :n] = problem.signs
        base[:, self.tau_column] = -1
        base[problem.falsifying_rows, self.delta_column] = 1
        self.base = base

        if objective == WEIGHT:
            magnitude = np.zeros((2 * n, width), dtype=np.int64)
            for s in range(n):
                magnitude[2 * s, s] = 1
                magnitude[2 * s + 1, s] = -1
                magnitude[2 * s, n + 2 + s] = -1
                magnitude[2 * s + 1, n + 2 + s] = -1
            self.extra = magnitude
        else:
            self.extra = np.zeros((0, width), dtype=np.int64)

        self.lower: list[Fraction] = [Fraction(-1)] * n + [Fraction(-n), Fraction(gap_floor or 0)]
        self.upper: list[Fraction] = [Fraction(1)] * n + [Fraction(n), Fraction(2 * n)]
        if objective == WEIGHT:
            self.lower += [Fraction(0)] * n
            self.upper += [Fraction(1)] * n
        self._bounds = [(float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper)]

        gain = np.zeros(width, dtype=np.int64)
        if objective == GAP:
            gain[self.delta_column] = 1
        else:
            gain[n + 2 :] = -1
        self.gain = gain

    def rows(self, witnesses: Mapping[int, int]) -> np.ndarray:
        """Every extension at or below its target, fixed witnesses at or above it"""
        fixed = [self.problem.index(x, b) for x, b in sorted(witnesses.items())]
        return np.vstack([self.base, self.extra, -self.base[fixed]])

    def solve(self, witnesses: Mapping[int, int]) -> NodeSolution:
        rows = self.rows(witnesses)
        result = linprog(
            -self.gain,
            A_ub=rows,
            b_ub=np.zeros(len(rows)),
            bounds=self._bounds,
            method="highs",
        )
        if result.status != 0:
            # infeasibility reports are rechecked as well, they prune whole subtrees
            self.logger.debug(f"HiGHS status {result.status}: {result.message}; solving the node exactly")
            return self._from_exact(self.exact_solve(witnesses))
        duals = np.maximum(-np.asarray(result.ineqlin.marginals), 0.0)
        return NodeSolution(
            LPStatus.OPTIMAL,
            float(-result.fun),
            np.asarray(result.x),
            duals,
            self._dual_bound(rows, duals),
        )

    def _from_exact(self, solution: LPSolution) -> NodeSolution:
        if not solution.is_optimal:
            return NodeSolution(LPStatus.INFEASIBLE)
        point = np.array([float(value) for value in solution.x])
        return NodeSolution(LPStatus.OPTIMAL, float(solution.value), point, None, solution.value)

    def _dual_bound(self, rows: np.ndarray, duals: np.ndarray) -> Fraction:
        """
        Weak duality with a rational y >= 0 rounded from the HiGHS duals:
        gain . v <= sum_j max(r_j * lower_j, r_j * upper_j), r = gain - rows^T y.
        """
        support = np.flatnonzero(duals > DUAL_SUPPORT)
        rounded = [Fraction(float(duals[i])).limit_denominator(self.config.DUAL_DENOMINATOR) for i in support]
        denominator = math.lcm(*(value.denominator for value in rounded)) if rounded else 1
        reduced = [int(g) * denominator for g in self.gain]
        for i, value in zip(support, rounded):
            scaled = value.numerator * (denominator // value.denominator)
            if scaled:
                for j in np.flatnonzero(rows[i]):
                    reduced[j] -= int(rows[i, j]) * scaled
        total = sum(max(r * lo, r * hi) for r, lo, hi in zip(reduced, self.lower, self.upper))
        return Fraction(total) / denominator

    def exact_bound(self, witnesses: Mapping[int, int], solution: NodeSolution | None = None) -> Fraction | None:
        """
        Exact optimum over the rows carrying dual weight (all rows without a
        solution). Dropping rows only relaxes the node, so this bounds it from
        above; None means the node is infeasible.
        """
        rows = self.rows(witnesses)
        if solution is not None and solution.duals is not None:
            rows = rows[solution.duals > DUAL_SUPPORT]
        exact = self._exact_lp(rows)
        return exact.value if exact.is_optimal else None

    def exact_solve(self, witnesses: Mapping[int, int], solution: NodeSolution | None = None) -> LPSolution:
        """Exact optimum of the node, adding violated rows until the restricted optimum is feasible"""
        rows = self.rows(witnesses)
        exact_rows = rows.astype(object)
        active = set(range(len(self.base), len(rows)))
        if solution is not None and solution.point is not None:
            slack = rows @ solution.point
            active.update(int(i) for i in np.flatnonzero(slack > -1e-6))
        while True:
            exact = self._exact_lp(rows[sorted(active)])
            if not exact.is_optimal:
                return exact
            x = np.array(exact.x, dtype=object)
            violated = {i for i, value in enumerate(exact_rows @ x) if value > 0} - active
            if not violated:
                return exact
            active.update(violated)

    def _exact_lp(self, rows: np.ndarray) -> LPSolution:
        """The LP over `rows` in rational arithmetic, columns shifted to start at their lower bound"""
        lp = RationalSimplex(self.width)
        for row in rows:
            columns = np.flatnonzero(row)
            rhs = -sum((int(row[j]) * self.lower[j] for j in columns), Fraction(0))
            lp.add_row({int(j): int(row[j]) for j in columns}, "<=", rhs)
        for j in range(self.width):
            lp.add_row({j: 1}, "<=", self.upper[j] - self.lower[j])
        solution = lp.maximize({int(j): int(self.gain[j]) for j in np.flatnonzero(self.gain)})
        if not solution.is_optimal:
            return solution
        x = tuple(lo + value for lo, value in zip(self.lower, solution.x))
        offset = sum((int(g) * lo for g, lo in zip(self.gain, self.lower)), Fraction(0))
        return LPSolution(LPStatus.OPTIMAL, solution.value + offset, x)
