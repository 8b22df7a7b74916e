"""
Exhaustive enumeration helpers.
This module evaluates weighted constraint sets on every assignment of a
variable order at once, using integer-scaled weights so results stay exact.
"""

import math
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

CHUNK_BITS = 20
INT64_HEADROOM = 2 ** 62


def _common_scale(weights: Sequence[Fraction]) -> int:
    scale = 1
    for weight in weights:
        scale = math.lcm(scale, Fraction(weight).denominator)
    return scale


class _BitSource:
    """Bit columns of a range of assignment indices, computed on demand"""

    def __init__(self, start: int, stop: int):
        self._indices = np.arange(start, stop, dtype=np.int64)
        self._columns: dict[int, np.ndarray] = {}

    def __call__(self, position: int) -> np.ndarray:
        if position not in self._columns:
            self._columns[position] = ((self._indices >> position) & 1).astype(np.int8)
        return self._columns[position]

    def __len__(self) -> int:
        return len(self._indices)


class ValueTable:
    """
    Satisfied weight of every assignment over `order`.

    Assignment index i gives variable order[j] the value of bit j of i.
    Values are integers; divide by `scale` for the exact rational.
    """

    def __init__(self, constraints: Sequence, order: Sequence[int]):
        self.order = tuple(order)
        position = {var: index for index, var in enumerate(self.order)}
        weights = [Fraction(constraint.weight) for constraint in constraints]
        self.scale = _common_scale(weights)
        self._terms = [
            (tuple(position[var] for var in constraint.scope), constraint.rhs, int(weight * self.scale))
            for constraint, weight in zip(constraints, weights)
        ]
        total = sum(term[2] for term in self._terms)
        self.dtype = np.int64 if total < INT64_HEADROOM else object

    @property
    def size(self) -> int:
        return 1 << len(self.order)

    def values(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        stop = self.size if stop is None else stop
        bits = _BitSource(start, stop)
        values = np.zeros(len(bits), dtype=self.dtype)
        for positions, rhs, weight in self._terms:
            parity = bits(positions[0])
            if len(positions) == 2:
                parity = parity ^ bits(positions[1])
            values[parity == rhs] += weight
        return values

    def chunks(self, chunk_bits: int = CHUNK_BITS) -> Iterator[tuple[int, np.ndarray]]:
        step = 1 << chunk_bits
        for start in range(0, self.size, step):
            yield start, self.values(start, min(start + step, self.size))

    def to_fraction(self, value) -> Fraction:
        return Fraction(int(value), self.scale)


def clause_counts(clauses: Sequence, order: Sequence[int], start: int = 0, stop: int | None = None) -> np.ndarray:
    """Number of satisfied clauses for every assignment over `order`"""
    position = {var: index for index, var in enumerate(order)}
    stop = (1 << len(order)) if stop is None else stop
    bits = _BitSource(start, stop)
    counts = np.zeros(len(bits), dtype=np.int64)
    for clause in clauses:
        satisfied = np.zeros(len(bits), dtype=bool)
        for literal in clause.literals:
            satisfied |= bits(position[literal.var]) != int(literal.negated)
        counts += satisfied
    return counts
