"""
Exact linear programming over rationals.
This module implements a dense two-phase tableau simplex with Bland's rule
on Fraction entries, so every reported optimum is exact.

Each pivot touches the whole tableau, O(rows * (vars + rows)) Fraction
operations whose numerators and denominators grow with the pivot count, and
Bland's rule may take exponentially many pivots in the worst case. A full
search node LP for k=4 with one auxiliary variable already costs minutes this
way, so the search solves node LPs in floating point and only hands this
solver the small row subsets needed to make bounds and gadgets exact.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping


SENSES = ("<=", ">=", "=")


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    value: Fraction | None = None
    x: tuple[Fraction, ...] = ()

    @property
    def is_optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class RationalSimplex:
    """
    maximize c.x subject to rows (<=, >=, =) and x >= 0.

    Rows are given as sparse {column: coefficient} mappings.
    """

    def __init__(self, num_vars: int):
        if num_vars < 1:
            raise ValueError("An LP needs at least one variable")
        self.num_vars = num_vars
        self._rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
        self.pivots = 0

    @property
    def num_rows(self) -> int:
        return len(self._rows)

    def add_row(self, coefficients: Mapping[int, object], sense: str, rhs) -> None:
        if sense not in SENSES:
            raise ValueError(f"Unknown row sense '{sense}'")
        row = {}
        for column, value in coefficients.items():
            if not 0 <= column < self.num_vars:
                raise ValueError(f"Column {column} out of range")
            value = Fraction(value)
            if value:
                row[column] = value
        self._rows.append((row, sense, Fraction(rhs)))

    def maximize(self, objective: Mapping[int, object]) -> LPSolution:
        tableau, basis, artificial_start = self._initial_tableau()
        width = len(tableau[0]) - 1 if tableau else self.num_vars

        # phase 1: maximize -sum(artificials)
        phase_one = [Fraction(0)] * (width + 1)
        for column in range(artificial_start, width):
            phase_one[column] = Fraction(1)
        for row, column in zip(tableau, basis):
            if column >= artificial_start:
                phase_one = [cost - entry for cost, entry in zip(phase_one, row)]
        status = self._iterate(tableau, basis, phase_one, width)
        if status is LPStatus.UNBOUNDED or phase_one[-1] < 0:
            return LPSolution(LPStatus.INFEASIBLE)
        self._drive_out_artificials(tableau, basis, artificial_start)

        # phase 2 on the structural and slack columns only
        for row in tableau:
            del row[artificial_start:width]
        width = artificial_start
        costs = [Fraction(0)] * (width + 1)
        for column, value in objective.items():
            costs[column] = -Fraction(value)
        for row, column in zip(tableau, basis):
            if costs[column]:
                factor = costs[column]
                costs = [cost - factor * entry for cost, entry in zip(costs, row)]
        status = self._iterate(tableau, basis, costs, width)
        if status is LPStatus.UNBOUNDED:
            return LPSolution(LPStatus.UNBOUNDED)

        x = [Fraction(0)] * self.num_vars
        for row, column in zip(tableau, basis):
            if column < self.num_vars:
                x[column] = row[-1]
        return LPSolution(LPStatus.OPTIMAL, costs[-1], tuple(x))

    def _initial_tableau(self) -> tuple[list[list[Fraction]], list[int], int]:
        """Rows with rhs >= 0, one slack or surplus per inequality, then artificials"""
        normalized = []
        for row, sense, rhs in self._rows:
            if rhs < 0:
                row = {column: -value for column, value in row.items()}
                rhs = -rhs
                sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
            normalized.append((row, sense, rhs))

        num_slack = sum(1 for _, sense, _ in normalized if sense != "=")
        num_artificial = sum(1 for _, sense, _ in normalized if sense != "<=")
        artificial_start = self.num_vars + num_slack
        width = artificial_start + num_artificial

        tableau, basis = [], []
        slack = self.num_vars
        artificial = artificial_start
        for row, sense, rhs in normalized:
            line = [Fraction(0)] * (width + 1)
            for column, value in row.items():
                line[column] = value
            line[-1] = rhs
            if sense == "<=":
                line[slack] = Fraction(1)
                basis.append(slack)
                slack += 1
            else:
                if sense == ">=":
                    line[slack] = Fraction(-1)
                    slack += 1
                line[artificial] = Fraction(1)
                basis.append(artificial)
                artificial += 1
            tableau.append(line)
        return tableau, basis, artificial_start

    def _pivot(self, tableau, basis, costs, pivot_row: int, pivot_column: int):
        self.pivots += 1
        row = tableau[pivot_row]
        pivot = row[pivot_column]
        if pivot != 1:
            row[:] = [entry / pivot for entry in row]
        for index, other in enumerate(tableau):
            if index != pivot_row and other[pivot_column]:
                factor = other[pivot_column]
                other[:] = [entry - factor * base for entry, base in zip(other, row)]
        if costs[pivot_column]:
            factor = costs[pivot_column]
            costs[:] = [cost - factor * base for cost, base in zip(costs, row)]
        basis[pivot_row] = pivot_column

    def _iterate(self, tableau, basis, costs, width: int) -> LPStatus:
        while True:
            entering = next((column for column in range(width) if costs[column] < 0), None)
            if entering is None:
                return LPStatus.OPTIMAL
            leaving = None
            best_ratio = None
            for index, row in enumerate(tableau):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[index] < basis[leaving])
                    ):
                        leaving, best_ratio = index, ratio
            if leaving is None:
                return LPStatus.UNBOUNDED
            self._pivot(tableau, basis, costs, leaving, entering)

    def _drive_out_artificials(self, tableau, basis, artificial_start: int):
        """Pivot zero-level artificials out of the basis; drop rows that are redundant"""
        index = 0
        while index < len(tableau):
            if basis[index] < artificial_start:
                index += 1
                continue
            row = tableau[index]
            column = next((c for c in range(artificial_start) if row[c] != 0), None)
            if column is None:
                del tableau[index]
                del basis[index]
                continue
            self._pivot(tableau, basis, [Fraction(0)] * len(row), index, column)
            index += 1
