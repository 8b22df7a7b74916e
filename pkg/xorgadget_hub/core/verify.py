"""
Formula-level verification and annealing for the gadget compiler.
This module checks the Opt/Cost relations of compiled formulas, the counting
statements behind tree-like gadgets, and solves problems by simulated annealing.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from xorgadget_hub.core.catalog import CompileResult, Strategy, compile_cnf
from xorgadget_hub.core.certify import GadgetCertificate, certify_cnf_gadget, certify_gadget
from xorgadget_hub.core.convert import IsingModel, ising_energy, max2xor_to_ising, to_spins
from xorgadget_hub.core.enumeration import ValueTable, clause_counts
from xorgadget_hub.core.exceptions import EnumerationLimitError, VerificationError
from xorgadget_hub.core.formula import CnfFormula, Literal
from xorgadget_hub.core.gadgets import TreeShape, VariableAllocator, rewrite_negations, tree_constraints
from xorgadget_hub.core.max2xor import Assignment, Max2XorProblem, XorConstraint, evaluate, exhaustive_opt
from xorgadget_hub.infra.settings import settings
from xorgadget_hub.logging_config import logger

__all__ = [
    "AnnealResult",
    "AnnealSchedule",
    "GadgetCertificate",
    "RelationReport",
    "Statement",
    "TreeLemmaReport",
    "anneal_solve",
    "certify_cnf_gadget",
    "certify_gadget",
    "check_opt_cost_relation",
    "check_tree_lemma",
]


class Statement(NamedTuple):
    name: str
    holds: bool
    details: str


def _raise_on_failure(statements: list[Statement]):
    failed = [statement for statement in statements if not statement.holds]
    if failed:
        raise VerificationError(
            ", ".join(statement.name for statement in failed),
            "; ".join(statement.details for statement in failed),
        )


# -- Opt/Cost relation -----------------------------------------------------------

@dataclass(frozen=True)
class RelationReport:
    """Opt and Cost of a formula's MaxSAT view next to those of its compilation"""

    opt: int
    cost: int
    compiled_opt: Fraction
    compiled_cost: Fraction
    predicted_opt: Fraction
    predicted_cost: Fraction
    all_strict: bool
    satisfiable: bool
    predicted_unsat: bool
    statements: tuple[Statement, ...]

    def to_json(self) -> dict:
        return {
            "opt": self.opt,
            "cost": self.cost,
            "compiled_opt": str(self.compiled_opt),
            "compiled_cost": str(self.compiled_cost),
            "predicted_opt": str(self.predicted_opt),
            "predicted_cost": str(self.predicted_cost),
            "all_strict": self.all_strict,
            "satisfiable": self.satisfiable,
            "predicted_unsat": self.predicted_unsat,
            "statements": [statement._asdict() for statement in self.statements],
        }


def check_opt_cost_relation(
    formula: CnfFormula,
    strategy: Strategy | str | None = None,
    var_limit: int | None = None,
) -> RelationReport:
    """
    Compare Opt/Cost before and after compilation by enumerating both sides.

    Equalities are required when every applied gadget is strict, the matching
    inequalities otherwise. Raises VerificationError when a statement fails.
    """
    limit = settings.relation_var_limit if var_limit is None else var_limit
    compiled: CompileResult = compile_cnf(formula, strategy)
    if compiled.problem.num_vars > limit:
        raise EnumerationLimitError(compiled.problem.num_vars, limit)

    counts = clause_counts(formula.clauses, range(1, formula.num_vars + 1))
    opt = int(counts.max())
    cost = len(formula.clauses) - opt
    result = exhaustive_opt(compiled.problem, var_limit=limit)

    predicted_opt = compiled.sum_alpha_minus_one + opt
    predicted_cost = compiled.sum_beta_minus_alpha + cost
    predicted_unsat = result.cost >= compiled.unsat_threshold

    if compiled.all_strict:
        statements = [
            Statement("opt equality", result.opt == predicted_opt, f"Opt(P')={result.opt}, expected {predicted_opt}"),
            Statement("cost equality", result.cost == predicted_cost, f"Cost(P')={result.cost}, expected {predicted_cost}"),
        ]
    else:
        statements = [
            Statement("opt bound", result.opt <= predicted_opt, f"Opt(P')={result.opt}, bound {predicted_opt}"),
            Statement("cost bound", result.cost >= predicted_cost, f"Cost(P')={result.cost}, bound {predicted_cost}"),
        ]
    statements.append(
        Statement(
            "unsat criterion",
            predicted_unsat == (cost > 0),
            f"Cost(P')={result.cost}, threshold {compiled.unsat_threshold}, formula cost {cost}",
        )
    )
    _raise_on_failure(statements)
    return RelationReport(
        opt=opt,
        cost=cost,
        compiled_opt=result.opt,
        compiled_cost=result.cost,
        predicted_opt=predicted_opt,
        predicted_cost=predicted_cost,
        all_strict=compiled.all_strict,
        satisfiable=cost == 0,
        predicted_unsat=predicted_unsat,
        statements=tuple(statements),
    )


# -- tree lemma --------------------------------------------------------------------

@dataclass(frozen=True)
class TreeLemmaReport:
    k: int
    shape: str
    num_constraints: int
    max_satisfied: int
    falsified_root_true_max: int
    statements: tuple[Statement, ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "shape": self.shape,
            "num_constraints": self.num_constraints,
            "max_satisfied": self.max_satisfied,
            "falsified_root_true_max": self.falsified_root_true_max,
            "statements": [statement._asdict() for statement in self.statements],
        }


def _max_satisfied(constraints: list[XorConstraint]) -> int:
    variables = sorted({var for constraint in constraints for var in constraint.scope})
    return int(ValueTable(constraints, variables).values().max())


def check_tree_lemma(k: int, shape: TreeShape | None = None) -> TreeLemmaReport:
    """
    Count-based statements about the tree construction with a variable root.

    Variables: x1..xk, root k+1, auxiliaries from k+2. Constraints are
    counted, not weighted.
    """
    if k < 2:
        raise ValueError("Tree gadgets need k >= 2")
    if k > settings.tree_lemma_width_limit:
        raise EnumerationLimitError(2 * k - 1, 2 * settings.tree_lemma_width_limit - 1)
    shape = shape or TreeShape.comb(k)
    if shape.width != k:
        raise ValueError(f"Shape {shape.to_text()} has {shape.width} leaves, expected {k}")

    root = k + 1
    allocator = VariableAllocator(k + 2)
    literal_constraints, aux = tree_constraints(shape, [Literal(var) for var in range(1, k + 1)], Literal(root), allocator)
    constraints = [XorConstraint(c.scope, c.rhs, 1) for c in rewrite_negations(literal_constraints)]

    table = ValueTable(constraints, [*range(1, k + 2), *aux])
    values = table.values().reshape(1 << len(aux), 2, 1 << k)
    best = values.max(axis=0)
    clause_value = (np.arange(1 << k) != 0).astype(np.int64)
    extends = best[clause_value, np.arange(1 << k)]

    triangle_max = max(_max_satisfied(constraints[index:index + 3]) for index in range(0, len(constraints), 3))

    num_constraints = len(constraints)
    max_satisfied = int(values.max())
    falsified_root_true = int(best[1, 0])
    statements = [
        Statement("constraint count", num_constraints == 3 * (k - 1), f"{num_constraints} constraints, expected {3 * (k - 1)}"),
        Statement("maximum", max_satisfied == 2 * (k - 1), f"max {max_satisfied}, expected {2 * (k - 1)}"),
        Statement(
            "extension",
            bool(np.all(extends == 2 * (k - 1))),
            f"some x misses {2 * (k - 1)} with root equal to the clause value",
        ),
        Statement(
            "falsified with root true",
            falsified_root_true == 2 * (k - 2),
            f"max {falsified_root_true}, expected {2 * (k - 2)}",
        ),
        Statement("triangles", triangle_max <= 2, f"a triangle satisfies {triangle_max} constraints"),
    ]
    _raise_on_failure(statements)
    return TreeLemmaReport(k, shape.to_text(), num_constraints, max_satisfied, falsified_root_true, tuple(statements))


# -- simulated annealing -----------------------------------------------------------

@dataclass(frozen=True)
class AnnealSchedule:
    """
    Geometric temperature schedule.

    Temperatures are relative to the largest coefficient magnitude.
    """

    sweeps: int = 400
    restarts: int = 4
    t_start: float = 2.0
    t_end: float = 0.02

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise ValueError("Sweeps and restarts must be positive")
        if not self.t_start >= self.t_end > 0:
            raise ValueError("Expected t_start >= t_end > 0")

    @classmethod
    def from_settings(cls) -> "AnnealSchedule":
        return cls(**settings.anneal)


@dataclass(frozen=True)
class AnnealResult:
    value: Fraction
    assignment: Assignment
    trace: tuple[float, ...] = field(default_factory=tuple)


def _dense(model: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    n = model.num_vars
    biases = np.zeros(n)
    couplings = np.zeros((n, n))
    for var, value in model.biases.items():
        biases[var - 1] = float(value)
    for (first, second), value in model.couplings.items():
        couplings[first - 1, second - 1] = couplings[second - 1, first - 1] = float(value)
    return biases, couplings


def _descend(spins: np.ndarray, fields: np.ndarray, couplings: np.ndarray) -> float:
    """Greedy single flips until none lowers the energy; returns the energy change"""
    change = 0.0
    improved = True
    while improved:
        improved = False
        for i in range(len(spins)):
            delta = 2.0 * spins[i] * fields[i]
            if delta < -1e-12:
                fields += -2.0 * spins[i] * couplings[:, i]
                spins[i] = -spins[i]
                change += delta
                improved = True
    return change


def _run(biases, couplings, temperatures, rng, trace: list[float]) -> np.ndarray:
    n = len(biases)
    spins = rng.choice(np.array([-1.0, 1.0]), size=n)
    fields = biases + couplings @ spins
    energy = float(biases @ spins + 0.5 * spins @ couplings @ spins)
    best_energy, best_spins = energy, spins.copy()
    for temperature in temperatures:
        draws = rng.random(n)
        for i in range(n):
            delta = 2.0 * spins[i] * fields[i]
            if delta <= 0 or draws[i] < np.exp(-delta / temperature):
                fields += -2.0 * spins[i] * couplings[:, i]
                spins[i] = -spins[i]
                energy += delta
                if energy < best_energy - 1e-12:
                    best_energy, best_spins = energy, spins.copy()
        trace.append(best_energy)

    fields = biases + couplings @ best_spins
    best_energy += _descend(best_spins, fields, couplings)
    trace[-1] = min(trace[-1], best_energy)
    return best_spins


def anneal_solve(
    model: Max2XorProblem | IsingModel,
    schedule: AnnealSchedule | None = None,
    seed: int | None = None,
) -> AnnealResult:
    """
    Single-flip Metropolis annealing, deterministic for a given seed.

    The value is the falsified weight for a Max2XOR problem and the energy
    for an Ising model, both re-scored exactly on the returned assignment.
    """
    schedule = schedule or AnnealSchedule.from_settings()
    seed = settings.default_seed if seed is None else seed
    ising = max2xor_to_ising(model) if isinstance(model, Max2XorProblem) else model

    def score(assignment: Assignment) -> Fraction:
        if isinstance(model, Max2XorProblem):
            return evaluate(model, assignment).falsified
        return ising_energy(model, to_spins(assignment, model.num_vars))

    if ising.is_empty():
        assignment = Assignment((0,) * model.num_vars)
        return AnnealResult(score(assignment), assignment, ())

    biases, couplings = _dense(ising)
    scale = float(max(abs(value) for value in ising.coefficients))
    temperatures = np.geomspace(schedule.t_start * scale, schedule.t_end * scale, schedule.sweeps)
    rng = np.random.default_rng(seed)

    trace: list[float] = []
    best: AnnealResult | None = None
    offset = float(ising.offset)
    for _ in range(schedule.restarts):
        spins = _run(biases, couplings, temperatures, rng, trace)
        assignment = Assignment(tuple(int(spin > 0) for spin in spins))
        value = score(assignment)
        if best is None or value < best.value:
            best = AnnealResult(value, assignment)

    # running minimum across restarts, offset included
    running = np.minimum.accumulate(np.array(trace)) + offset
    logger.debug(f"Annealing finished with value {best.value} after {len(trace)} sweeps")
    return AnnealResult(best.value, best.assignment, tuple(float(value) for value in running))
