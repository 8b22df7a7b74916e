"""
Max2XOR problem model for the gadget compiler.
This module implements weighted XOR constraints of arity at most two, their
evaluation, canonical simplification and exhaustive optimisation.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, NamedTuple

import numpy as np

from xorgadget_hub.core.enumeration import ValueTable
from xorgadget_hub.core.exceptions import EnumerationLimitError, ModelFormatError
from xorgadget_hub.infra.settings import settings


def to_fraction(value: Any) -> Fraction:
    """Exact rational from an int, a Fraction or a 'p/q' string"""
    if isinstance(value, float):
        raise TypeError("Weights must be exact rationals, not floats")
    if isinstance(value, bool):
        raise TypeError("Weights must be numbers")
    return Fraction(value)


@dataclass(frozen=True)
class XorConstraint:
    """Weighted parity constraint over one or two variables"""

    scope: tuple[int, ...]
    rhs: int
    weight: Fraction

    def __post_init__(self):
        scope = tuple(sorted(self.scope))
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "weight", to_fraction(self.weight))
        if len(scope) not in (1, 2):
            raise ValueError(f"Scope must have one or two variables, got {len(scope)}")
        if len(set(scope)) != len(scope):
            raise ValueError("Scope variables must be distinct")
        if scope[0] < 1:
            raise ValueError("Variable indices start at 1")
        if self.rhs not in (0, 1):
            raise ValueError("Right-hand side must be 0 or 1")
        if self.weight <= 0:
            raise ValueError(f"Weight must be positive, got {self.weight}")

    @classmethod
    def unary(cls, var: int, rhs: int, weight) -> "XorConstraint":
        return cls((var,), rhs, weight)

    @classmethod
    def pair(cls, first: int, second: int, rhs: int, weight) -> "XorConstraint":
        return cls((first, second), rhs, weight)

    @property
    def is_unary(self) -> bool:
        return len(self.scope) == 1

    def is_satisfied(self, values: Mapping[int, int]) -> bool:
        parity = 0
        for var in self.scope:
            parity ^= values[var]
        return parity == self.rhs

    def to_json(self) -> list:
        return [*self.scope, self.rhs, str(self.weight)]

    @classmethod
    def from_json(cls, item: list) -> "XorConstraint":
        if not isinstance(item, list) or len(item) not in (3, 4):
            raise ModelFormatError("m2x", f"constraint entry {item!r}")
        *scope, rhs, weight = item
        return cls(tuple(int(var) for var in scope), int(rhs), Fraction(str(weight)))

    def __str__(self) -> str:
        lhs = "⊕".join(f"x{var}" for var in self.scope)
        return f"{self.weight}: {lhs}={self.rhs}"


@dataclass(frozen=True)
class Assignment:
    """Bit vector over variables 1..n"""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(bit) for bit in self.bits)
        if any(bit not in (0, 1) for bit in bits):
            raise ValueError("Assignment bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_int(cls, value: int, num_vars: int) -> "Assignment":
        """Variable i takes bit i-1 of `value`"""
        return cls(tuple((value >> index) & 1 for index in range(num_vars)))

    def to_int(self) -> int:
        return sum(bit << index for index, bit in enumerate(self.bits))

    @property
    def num_vars(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, var: int) -> int:
        if not 1 <= var <= len(self.bits):
            raise KeyError(f"Variable {var} is not covered by this assignment")
        return self.bits[var - 1]

    def __str__(self) -> str:
        return "".join(str(bit) for bit in self.bits)


class Evaluation(NamedTuple):
    satisfied: Fraction
    falsified: Fraction


@dataclass(frozen=True)
class OptResult:
    """Exact optimum of a problem and the optimal assignments found"""

    opt: Fraction
    cost: Fraction
    witnesses: tuple[Assignment, ...]


@dataclass(frozen=True)
class Max2XorProblem:
    """
    Weighted Max2XOR problem.

    The offset is the weight of cancelled opposite pairs; each such pair is
    half satisfied and half falsified by every assignment, so the offset is
    counted on both sides and `weight` is the weight before cancellation.
    """

    num_vars: int
    constraints: tuple[XorConstraint, ...] = field(default_factory=tuple)
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "offset", to_fraction(self.offset))
        if self.num_vars < 0:
            raise ValueError("Number of variables cannot be negative")
        for constraint in self.constraints:
            if constraint.scope[-1] > self.num_vars:
                raise ValueError(f"Constraint {constraint} exceeds {self.num_vars} variables")

    @property
    def constraint_weight(self) -> Fraction:
        return sum((constraint.weight for constraint in self.constraints), Fraction(0))

    @property
    def weight(self) -> Fraction:
        return self.constraint_weight + 2 * self.offset

    @property
    def max_weight(self) -> Fraction:
        return max((constraint.weight for constraint in self.constraints), default=Fraction(0))

    @property
    def variables(self) -> set[int]:
        """Variables mentioned by some constraint"""
        return {var for constraint in self.constraints for var in constraint.scope}

    def is_simplified(self) -> bool:
        scopes = [constraint.scope for constraint in self.constraints]
        return len(scopes) == len(set(scopes)) and self.constraints == simplify(self).constraints

    def with_num_vars(self, num_vars: int) -> "Max2XorProblem":
        return Max2XorProblem(num_vars, self.constraints, self.offset)

    def merged_with(self, other: "Max2XorProblem") -> "Max2XorProblem":
        """Simplified union of two problems, offsets added"""
        merged = Max2XorProblem(
            max(self.num_vars, other.num_vars),
            self.constraints + other.constraints,
            self.offset + other.offset,
        )
        return simplify(merged)

    def scale(self, factor) -> "Max2XorProblem":
        factor = to_fraction(factor)
        if factor <= 0:
            raise ValueError("Scale factor must be positive")
        constraints = tuple(XorConstraint(c.scope, c.rhs, c.weight * factor) for c in self.constraints)
        return Max2XorProblem(self.num_vars, constraints, self.offset * factor)

    def to_json(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "offset": str(self.offset),
            "constraints": [constraint.to_json() for constraint in self.constraints],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Max2XorProblem":
        try:
            return cls(
                int(data["num_vars"]),
                tuple(XorConstraint.from_json(item) for item in data.get("constraints", [])),
                Fraction(str(data.get("offset", "0"))),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError("m2x", str(e)) from e

    def __str__(self) -> str:
        body = ", ".join(str(constraint) for constraint in self.constraints)
        return f"{{{body}}} + {self.offset}"


def evaluate(problem: Max2XorProblem, assignment: Assignment) -> Evaluation:
    """Satisfied and falsified weight of an assignment, offset included on both sides"""
    if len(assignment) < problem.num_vars:
        raise ValueError(f"Assignment covers {len(assignment)} variables, problem has {problem.num_vars}")
    satisfied = problem.offset
    falsified = problem.offset
    for constraint in problem.constraints:
        if constraint.is_satisfied(assignment):
            satisfied += constraint.weight
        else:
            falsified += constraint.weight
    return Evaluation(satisfied, falsified)


def simplify(problem: Max2XorProblem) -> Max2XorProblem:
    """Merge equal constraints, cancel opposite pairs into the offset, sort canonically"""
    merged: dict[tuple[tuple[int, ...], int], Fraction] = defaultdict(Fraction)
    for constraint in problem.constraints:
        merged[(constraint.scope, constraint.rhs)] += constraint.weight

    offset = problem.offset
    constraints = []
    for scope in sorted({scope for scope, _ in merged}):
        zero = merged.get((scope, 0), Fraction(0))
        one = merged.get((scope, 1), Fraction(0))
        common = min(zero, one)
        offset += common
        for rhs, weight in ((0, zero - common), (1, one - common)):
            if weight > 0:
                constraints.append(XorConstraint(scope, rhs, weight))
    return Max2XorProblem(problem.num_vars, tuple(constraints), offset)


def union(num_vars: int, parts: Iterable[Iterable[XorConstraint]]) -> Max2XorProblem:
    """Unsimplified problem holding every constraint of every part"""
    return Max2XorProblem(num_vars, tuple(constraint for part in parts for constraint in part))


def exhaustive_opt(
    problem: Max2XorProblem,
    var_limit: int | None = None,
    witness_cap: int | None = None,
) -> OptResult:
    """
    Exact Opt and Cost by enumerating every assignment.

    Witnesses are the optimal assignments in ascending integer order, up to
    `witness_cap` of them.
    """
    limit = settings.enumeration_var_limit if var_limit is None else var_limit
    cap = settings.witness_cap if witness_cap is None else witness_cap
    if problem.num_vars > limit:
        raise EnumerationLimitError(problem.num_vars, limit)

    table = ValueTable(problem.constraints, range(1, problem.num_vars + 1))
    best = None
    witnesses: list[int] = []
    for start, values in table.chunks():
        chunk_best = values.max()
        if best is None or chunk_best > best:
            best = chunk_best
            witnesses = []
        if chunk_best == best and len(witnesses) < cap:
            hits = np.flatnonzero(values == best)[: cap - len(witnesses)]
            witnesses.extend(start + int(hit) for hit in hits)

    opt = problem.offset + table.to_fraction(best)
    return OptResult(
        opt=opt,
        cost=problem.weight - opt,
        witnesses=tuple(Assignment.from_int(value, problem.num_vars) for value in witnesses),
    )
