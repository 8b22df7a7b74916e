import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from xorgadget_hub.core.catalog import get_gadget
from xorgadget_hub.core.exceptions import SearchLimitError, UnsupportedWidthError
from xorgadget_hub.core.gadgets import VariableAllocator

from .config import SearchConfig
from .model import Candidate, SearchProblem
from .relaxation import GAP, WEIGHT, NodeRelaxation, NodeSolution
from .simplex import LPStatus
from .symmetry import WitnessSymmetry


Score = Callable[[Candidate], Fraction | float]


class BaseSearchMethod(ABC):
    """Abstract base class for gadget search methods"""

    name = "base"

    def __init__(self, problem: SearchProblem, config: SearchConfig = None):
        self.problem = problem
        self.config = config or SearchConfig()
        self.logger = logging.getLogger(__name__)
        self.nodes = 0

    @abstractmethod
    def maximize_gap(self, incumbent: Candidate | None = None) -> Candidate | None:
        """Gadget with the largest gap found, or None when none was found"""
        pass

    @abstractmethod
    def minimize_weight(self, candidate: Candidate) -> Candidate:
        """Lightest gadget keeping the gap of `candidate`"""
        pass

    def warm_candidates(self) -> list[Candidate]:
        """Catalog gadgets of this width that fit into the aux budget"""
        candidates = []
        clause = self.problem.clause
        for name in self.config.WARM_START_GADGETS:
            gadget = get_gadget(name)
            if not gadget.supports(clause.width):
                continue
            try:
                app = gadget.apply(clause, VariableAllocator(clause.width + 1))
            except UnsupportedWidthError:
                continue
            if len(app.aux_vars) > self.problem.num_aux:
                continue
            fragment = app.constraints.with_num_vars(self.problem.num_vars)
            candidate = self.problem.evaluate(self.problem.coefficients_of(fragment))
            if candidate is not None:
                candidates.append(candidate)
        return candidates

    def _rounded(self, solution: NodeSolution) -> Candidate | None:
        """Exact gadget from the rounded LP coefficients, if they form one"""
        denominator = self.config.PRIMAL_DENOMINATOR
        coefficients = [
            Fraction(float(value)).limit_denominator(denominator)
            for value in solution.point[: self.problem.num_scopes]
        ]
        return self.problem.evaluate(coefficients)


def better_gap(first: Candidate | None, second: Candidate | None) -> Candidate | None:
    """Larger gap wins, then smaller weight"""
    if first is None or second is None:
        return first or second
    if (second.delta_e, -second.weight) > (first.delta_e, -first.weight):
        return second
    return first


class ExactSearch(BaseSearchMethod):
    """
    Branch and bound over witness extensions.

    A node fixes the witness pattern of some required inputs; its LP bound is
    made rigorous in rational arithmetic before any pruning. Inputs are
    branched class by class (falsifying input, odd weights, even weights),
    and only lexicographically smallest witness assignments are explored.
    """

    name = "exact"

    def __init__(self, problem: SearchProblem, config: SearchConfig = None):
        super().__init__(problem, config)
        self.symmetry = WitnessSymmetry(problem)

    def maximize_gap(self, incumbent: Candidate | None = None) -> Candidate | None:
        relaxation = NodeRelaxation(self.problem, GAP, config=self.config)
        best = incumbent
        stack: list[dict[int, int]] = [{}]
        while stack:
            witnesses = stack.pop()
            self._count()
            threshold = best.delta_e if best is not None else Fraction(0)
            solution = relaxation.solve(witnesses)
            if self._dominated(relaxation, witnesses, solution, threshold):
                continue
            found = self._resolve(relaxation, witnesses, solution, lambda c: c.delta_e)
            if found is not None and found.delta_e > threshold:
                best = found
                self.logger.debug(f"New incumbent with gap {found.delta_e} after {self.nodes} nodes")
            if self._closed(witnesses, found, solution, lambda c: c.delta_e):
                continue
            self._branch(stack, relaxation, witnesses, solution)

        self.logger.info(f"Exact gap search on k={self.problem.k}, aux={self.problem.num_aux}: {self.nodes} nodes")
        return best

    def minimize_weight(self, candidate: Candidate) -> Candidate:
        gaps = NodeRelaxation(self.problem, GAP, config=self.config)
        weights = NodeRelaxation(self.problem, WEIGHT, candidate.delta_e, self.config)
        best = candidate

        def score(found: Candidate) -> Fraction | float:
            return -found.weight if found.delta_e == candidate.delta_e else -np.inf

        stack: list[dict[int, int]] = [{}]
        while stack:
            witnesses = stack.pop()
            self._count()
            if self._dominated(gaps, witnesses, gaps.solve(witnesses), candidate.delta_e, strict=True):
                continue
            solution = weights.solve(witnesses)
            if self._dominated(weights, witnesses, solution, -best.weight):
                continue
            found = self._resolve(weights, witnesses, solution, score)
            if found is not None and score(found) > -best.weight:
                best = found
                self.logger.debug(f"New incumbent with weight {found.weight} after {self.nodes} nodes")
            if self._closed(witnesses, found, solution, score):
                continue
            self._branch(stack, weights, witnesses, solution)

        self.logger.info(f"Exact weight search on k={self.problem.k}, aux={self.problem.num_aux}: {self.nodes} nodes")
        return best

    def _count(self):
        self.nodes += 1
        if self.nodes > self.config.NODE_LIMIT:
            raise SearchLimitError(f"branch and bound exceeded {self.config.NODE_LIMIT} nodes")

    def _is_leaf(self, witnesses: Mapping[int, int]) -> bool:
        return len(witnesses) == len(self.symmetry.order)

    def _dominated(
        self,
        relaxation: NodeRelaxation,
        witnesses: Mapping[int, int],
        solution: NodeSolution,
        threshold: Fraction,
        strict: bool = False,
    ) -> bool:
        """True when the node provably cannot beat `threshold` (or reach it, with strict)"""

        def below(value: Fraction | None) -> bool:
            return value is None or (value < threshold if strict else value <= threshold)

        if solution.status is LPStatus.INFEASIBLE or below(solution.bound):
            return True
        # the rational simplex only runs where the float optimum says the node is dominated
        margin = -self.config.TOLERANCE if strict else self.config.TOLERANCE
        if solution.value > float(threshold) + margin:
            return False
        return below(relaxation.exact_bound(witnesses, solution))

    def _deficits(self, relaxation: NodeRelaxation, solution: NodeSolution) -> dict[int, float]:
        """Required inputs whose best extension falls short of the target at the LP point"""
        point = solution.point
        values = self.problem.float_values(point[: self.problem.num_scopes])
        tau = point[relaxation.tau_column]
        delta = point[relaxation.delta_column]
        shortfalls = {}
        for x in self.symmetry.order:
            target = tau - (delta if x == 0 else 0)
            shortfall = target - values[:, x].max()
            if shortfall > self.config.TOLERANCE:
                shortfalls[x] = float(shortfall)
        return shortfalls

    def _resolve(
        self,
        relaxation: NodeRelaxation,
        witnesses: Mapping[int, int],
        solution: NodeSolution,
        score: Score,
    ) -> Candidate | None:
        """An exact gadget attaining the node optimum, when the LP point describes one"""
        leaf = self._is_leaf(witnesses)
        if not leaf and self._deficits(relaxation, solution):
            return None
        candidate = self._rounded(solution)
        if leaf and (candidate is None or score(candidate) < solution.bound):
            exact = relaxation.exact_solve(witnesses, solution)
            if exact.is_optimal:
                candidate = better_gap(candidate, self.problem.evaluate(exact.x[: self.problem.num_scopes]))
        return candidate

    def _closed(self, witnesses: Mapping[int, int], found: Candidate | None, solution: NodeSolution, score: Score) -> bool:
        if self._is_leaf(witnesses):
            return True
        return found is not None and score(found) >= solution.bound

    def _next_input(self, witnesses: Mapping[int, int], deficits: Mapping[int, float]) -> int:
        for group in self.symmetry.classes:
            open_inputs = [x for x in group if x not in witnesses]
            if not open_inputs:
                continue
            if group[0].bit_count() == 1:
                return open_inputs[0]
            return max(open_inputs, key=lambda x: (deficits.get(x, 0.0), -x))
        raise ValueError("Every required input already has a witness")

    def _branch(
        self,
        stack: list[dict[int, int]],
        relaxation: NodeRelaxation,
        witnesses: dict[int, int],
        solution: NodeSolution,
    ):
        x = self._next_input(witnesses, self._deficits(relaxation, solution))
        values = self.problem.float_values(solution.point[: self.problem.num_scopes])
        patterns = sorted(self.symmetry.patterns(x, witnesses), key=lambda b: (-values[b, x], b))
        for b in reversed(patterns):
            child = {**witnesses, x: b}
            if self.symmetry.completes_class(child, x) and not self.symmetry.is_leader(child, x):
                continue
            stack.append(child)


class HeuristicSearch(BaseSearchMethod):
    """Alternates LPs with fixed witnesses and argmax witnesses from several starts"""

    name = "heuristic"

    def __init__(self, problem: SearchProblem, config: SearchConfig = None, seed: int = 0):
        super().__init__(problem, config)
        self.rng = np.random.default_rng(seed)

    def _random_starts(self) -> list[dict[int, int]]:
        inputs = self.problem.required_inputs
        starts = []
        for _ in range(self.config.HEURISTIC_RANDOM_STARTS):
            patterns = self.rng.integers(0, 1 << self.problem.num_aux, size=len(inputs))
            starts.append({x: int(b) for x, b in zip(inputs, patterns)})
        return starts

    def _best_extensions(self, solution: NodeSolution, witnesses: Mapping[int, int]) -> dict[int, int]:
        """Argmax extension of every required input at the LP point, keeping current ones on ties"""
        values = self.problem.float_values(solution.point[: self.problem.num_scopes])
        chosen = {}
        for x in self.problem.required_inputs:
            column = values[:, x]
            best = column.max()
            current = witnesses.get(x)
            if current is not None and column[current] >= best - self.config.TOLERANCE:
                chosen[x] = current
            else:
                chosen[x] = int(column.argmax())
        return chosen

    def maximize_gap(self, incumbent: Candidate | None = None) -> Candidate | None:
        relaxation = NodeRelaxation(self.problem, GAP, config=self.config)
        best = incumbent
        warm = self.warm_candidates()
        for candidate in warm:
            best = better_gap(best, candidate)
        for witnesses in [candidate.witnesses for candidate in warm] + self._random_starts():
            for _ in range(self.config.HEURISTIC_ITERATIONS):
                self.nodes += 1
                solution = relaxation.solve(witnesses)
                if not solution.is_optimal or solution.value <= self.config.TOLERANCE:
                    break
                best = better_gap(best, self._rounded(solution))
                updated = self._best_extensions(solution, witnesses)
                if updated == witnesses:
                    break
                witnesses = updated
        if best is not None:
            self.logger.info(f"Heuristic search on k={self.problem.k}, aux={self.problem.num_aux}: gap {best.delta_e}")
        return best

    def minimize_weight(self, candidate: Candidate) -> Candidate:
        relaxation = NodeRelaxation(self.problem, WEIGHT, candidate.delta_e, self.config)
        self.nodes += 1
        solution = relaxation.solve(candidate.witnesses)
        if not solution.is_optimal:
            return candidate
        found = self._rounded(solution)
        if found is None or found.delta_e != candidate.delta_e or found.weight >= candidate.weight:
            return candidate
        return found
