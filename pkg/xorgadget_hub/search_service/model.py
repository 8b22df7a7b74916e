"""
Gadget search model.
This module describes the scopes of a gadget search, evaluates signed
coefficient vectors exactly and turns them into gadget constraints.

A scope s carries one signed coefficient c_s: positive means the constraint
"parity of s is 0", negative means "parity of s is 1", both with weight |c_s|.
The objective is U(z) = sum_s c_s * (-1)^parity_s(z), which differs from
twice the satisfied weight by the constant sum_s |c_s|.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from xorgadget_hub.core.exceptions import SearchLimitError
from xorgadget_hub.core.formula import Clause
from xorgadget_hub.core.gadgets import GadgetApplication
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint, simplify

from .config import SearchConfig


PoolEntry = tuple[tuple[int, ...], int]


@dataclass(frozen=True)
class Candidate:
    """
    An exact gadget found by the search.

    Coefficients are scaled so that max |c_s| = 1; the gap of U between the
    satisfying inputs and the falsifying one is then the energy gap itself.
    """

    coefficients: tuple[Fraction, ...]
    delta_e: Fraction
    weight: Fraction
    witnesses: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class SearchProblem:
    """
    Search for a gadget of x1∨...∨xk with `num_aux` auxiliary variables.

    Inputs are the integers 0..2^k-1 (bit i-1 is x_i); the only falsifying
    input is 0. Assignment index x + (b << k) extends input x by aux pattern b.
    """

    k: int
    num_aux: int
    strict_required: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("Gadget search needs clause width at least 2")
        if self.num_aux < 0:
            raise ValueError("Number of auxiliary variables cannot be negative")
        if self.k > SearchConfig.MAX_WIDTH or self.num_aux > SearchConfig.MAX_AUX:
            raise SearchLimitError(
                f"k={self.k}, aux={self.num_aux} exceeds the supported "
                f"k <= {SearchConfig.MAX_WIDTH}, aux <= {SearchConfig.MAX_AUX}"
            )

    @property
    def num_vars(self) -> int:
        return self.k + self.num_aux

    @property
    def num_assignments(self) -> int:
        return 1 << self.num_vars

    @property
    def clause(self) -> Clause:
        return Clause.of(*range(1, self.k + 1))

    @property
    def aux_vars(self) -> tuple[int, ...]:
        return tuple(range(self.k + 1, self.num_vars + 1))

    @cached_property
    def scopes(self) -> tuple[tuple[int, ...], ...]:
        """Every unary and pair scope over the k+A variables"""
        variables = range(1, self.num_vars + 1)
        return tuple([(var,) for var in variables] + list(combinations(variables, 2)))

    @cached_property
    def scope_index(self) -> dict[tuple[int, ...], int]:
        return {scope: index for index, scope in enumerate(self.scopes)}

    @property
    def num_scopes(self) -> int:
        return len(self.scopes)

    @cached_property
    def pool(self) -> tuple[PoolEntry, ...]:
        """Every scope with both right-hand sides"""
        return tuple((scope, rhs) for scope in self.scopes for rhs in (0, 1))

    @cached_property
    def pool_index(self) -> dict[PoolEntry, int]:
        return {entry: index for index, entry in enumerate(self.pool)}

    @property
    def pool_size(self) -> int:
        return len(self.pool)

    @cached_property
    def _parities(self) -> np.ndarray:
        """0/1 matrix: assignment index by scope"""
        indices = np.arange(self.num_assignments, dtype=np.int64)
        bits = [(indices >> position) & 1 for position in range(self.num_vars)]
        columns = []
        for scope in self.scopes:
            parity = bits[scope[0] - 1].copy()
            for var in scope[1:]:
                parity ^= bits[var - 1]
            columns.append(parity)
        return np.stack(columns, axis=1)

    @cached_property
    def signs(self) -> np.ndarray:
        """(-1)^parity: assignment index by scope"""
        return (1 - 2 * self._parities).astype(np.int64)

    @cached_property
    def satisfaction(self) -> np.ndarray:
        """0/1 matrix: assignment index by pool entry"""
        parities = np.repeat(self._parities, 2, axis=1)
        rhs = np.tile(np.array([0, 1]), self.num_scopes)
        return (parities == rhs).astype(np.int8)

    @cached_property
    def falsifying_rows(self) -> np.ndarray:
        """Assignment indices extending the falsifying input"""
        return np.arange(1 << self.num_aux, dtype=np.int64) << self.k

    @property
    def required_inputs(self) -> list[int]:
        """Inputs that need a witness extension reaching their target"""
        return [x for x in range(1 << self.k) if x != 0 or self.strict_required]

    def index(self, x: int, b: int) -> int:
        return x + (b << self.k)

    def extension_values(self, weights: Sequence[Fraction]) -> tuple[np.ndarray, int]:
        """Integer-scaled satisfied weight per (aux pattern, input) and the scale"""
        scale = 1
        for weight in weights:
            scale = math.lcm(scale, Fraction(weight).denominator)
        scaled = np.array([int(Fraction(weight) * scale) for weight in weights], dtype=object)
        values = self.satisfaction.astype(object) @ scaled
        return values.reshape(1 << self.num_aux, 1 << self.k), scale

    def witnesses(self, weights: Sequence[Fraction], prefer: Mapping[int, int] | None = None) -> dict[int, int]:
        """Best extension of every required input; `prefer` wins ties, then the smallest pattern"""
        values, _ = self.extension_values(weights)
        return self._argmax(values, prefer)

    def _argmax(self, values: np.ndarray, prefer: Mapping[int, int] | None = None) -> dict[int, int]:
        prefer = prefer or {}
        chosen = {}
        for x in self.required_inputs:
            column = values[:, x]
            best = max(column)
            if x in prefer and column[prefer[x]] == best:
                chosen[x] = prefer[x]
            else:
                chosen[x] = next(b for b in range(len(column)) if column[b] == best)
        return chosen

    def weights_of(self, problem: Max2XorProblem) -> tuple[Fraction, ...]:
        """Pool weight vector of a constraint set over the same variables"""
        weights = [Fraction(0)] * self.pool_size
        for constraint in problem.constraints:
            weights[self.pool_index[(constraint.scope, constraint.rhs)]] += constraint.weight
        return tuple(weights)

    def coefficients_of(self, problem: Max2XorProblem) -> tuple[Fraction, ...]:
        """Signed scope coefficients of a constraint set over the same variables"""
        coefficients = [Fraction(0)] * self.num_scopes
        for constraint in problem.constraints:
            sign = 1 if constraint.rhs == 0 else -1
            coefficients[self.scope_index[constraint.scope]] += sign * constraint.weight
        return tuple(coefficients)

    def float_values(self, coefficients: np.ndarray) -> np.ndarray:
        """U per (aux pattern, input) in floating point"""
        return (self.signs @ coefficients).reshape(1 << self.num_aux, 1 << self.k)

    def exact_values(self, coefficients: Sequence[Fraction]) -> tuple[np.ndarray, int]:
        """Integer-scaled U per (aux pattern, input) and the scale"""
        scale = 1
        for value in coefficients:
            scale = math.lcm(scale, Fraction(value).denominator)
        scaled = np.array([int(Fraction(value) * scale) for value in coefficients], dtype=object)
        values = self.signs.astype(object) @ scaled
        return values.reshape(1 << self.num_aux, 1 << self.k), scale

    def evaluate(self, coefficients: Sequence[Fraction]) -> Candidate | None:
        """Exact gadget check of a coefficient vector; None when it is not a gadget"""
        coefficients = [Fraction(value) for value in coefficients]
        largest = max((abs(value) for value in coefficients), default=Fraction(0))
        if largest == 0:
            return None
        coefficients = tuple(value / largest for value in coefficients)
        values, scale = self.exact_values(coefficients)
        best = [max(values[:, x]) for x in range(1 << self.k)]
        if len(set(best[1:])) != 1:
            return None
        gap = Fraction(best[1] - best[0], scale)
        if gap <= 0:
            return None
        weight = sum((abs(value) for value in coefficients), Fraction(0))
        return Candidate(coefficients, gap, weight, self._argmax(values))

    def gadget_constraints(self, candidate: Candidate) -> Max2XorProblem:
        """Constraints rescaled so the falsifying input sits exactly one below alpha"""
        constraints = [
            XorConstraint(scope, 0 if value > 0 else 1, abs(value) * 2 / candidate.delta_e)
            for scope, value in zip(self.scopes, candidate.coefficients)
            if value != 0
        ]
        return simplify(Max2XorProblem(self.num_vars, tuple(constraints)))


@dataclass(frozen=True)
class SearchResult:
    gadget: GadgetApplication
    alpha: Fraction
    beta: Fraction
    delta_e: Fraction
    optimal: bool
    method: str
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "name": self.gadget.params.name,
            "width": len(self.gadget.clause_vars),
            "num_aux": len(self.gadget.aux_vars),
            "constraints": self.gadget.constraints.to_json(),
            "params": self.gadget.params.to_json(),
            "optimal": self.optimal,
            "method": self.method,
            "nodes": self.nodes,
        }
