"""
Symmetry breaking for witness branching.
Permuting the clause variables, permuting the auxiliary variables and
negating auxiliary variables all map gadgets to gadgets with the same
parameters. Branch and bound only keeps witness assignments that are
lexicographically smallest in their orbit, checked whenever a class of
inputs with equal Hamming weight has been fully assigned.
"""

from itertools import permutations
from typing import Mapping

import numpy as np

from .model import SearchProblem


def permute_bits(value: int, permutation: tuple[int, ...]) -> int:
    """Moves bit i of `value` to bit permutation[i]"""
    result = 0
    for position, target in enumerate(permutation):
        if value >> position & 1:
            result |= 1 << target
    return result


class WitnessSymmetry:
    def __init__(self, problem: SearchProblem):
        self.problem = problem
        self.order = sorted(problem.required_inputs, key=lambda x: (self.class_key(x), x))
        self.classes: list[list[int]] = []
        for x in self.order:
            if self.classes and self.class_key(self.classes[-1][0]) == self.class_key(x):
                self.classes[-1].append(x)
            else:
                self.classes.append([x])
        self._class_end = {}
        end = 0
        for group in self.classes:
            end += len(group)
            for x in group:
                self._class_end[x] = end

        position = {x: p for p, x in enumerate(self.order)}
        self._positions = np.array(
            [[position[permute_bits(x, permutation)] for x in self.order] for permutation in permutations(range(problem.k))],
            dtype=np.int64,
        )
        num_patterns = 1 << problem.num_aux
        tables = []
        for permutation in permutations(range(problem.num_aux)):
            for mask in range(num_patterns):
                table = [permute_bits(b, permutation) ^ mask for b in range(num_patterns)]
                if table != list(range(num_patterns)):
                    tables.append(table)
        self._tables = np.array(tables, dtype=np.int64).reshape(len(tables), num_patterns)

    @staticmethod
    def class_key(x: int) -> tuple[int, int]:
        """The falsifying input, then odd Hamming weights, then even ones"""
        weight = x.bit_count()
        if weight == 0:
            return 0, 0
        return (1 if weight % 2 else 2), weight

    def patterns(self, x: int, witnesses: Mapping[int, int]) -> list[int]:
        """Witness patterns worth trying for `x` given the earlier choices"""
        if x == 0:
            return [0]
        start = 0
        if x.bit_count() == 1 and x > 1:
            start = witnesses.get(x >> 1, 0)
        return list(range(start, 1 << self.problem.num_aux))

    def completes_class(self, witnesses: Mapping[int, int], x: int) -> bool:
        return all(y in witnesses for y in self.order[: self._class_end[x]])

    def is_leader(self, witnesses: Mapping[int, int], x: int) -> bool:
        """No symmetry maps the assigned classes up to x onto a smaller witness sequence"""
        length = self._class_end[x]
        sequence = np.array([witnesses[y] for y in self.order[:length]], dtype=np.int64)
        moved = sequence[self._positions[:, :length]]
        for table in self._tables:
            image = table[moved]
            differs = image != sequence
            rows = np.flatnonzero(differs.any(axis=1))
            if len(rows) == 0:
                continue
            first = differs[rows].argmax(axis=1)
            if (image[rows, first] < sequence[first]).any():
                return False
        # clause permutations alone
        differs = moved != sequence
        rows = np.flatnonzero(differs.any(axis=1))
        if len(rows):
            first = differs[rows].argmax(axis=1)
            if (moved[rows, first] < sequence[first]).any():
                return False
        return True
