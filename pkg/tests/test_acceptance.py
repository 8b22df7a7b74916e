from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from xorgadget_hub.core.catalog import compile_cnf
from xorgadget_hub.core.convert import (
    IsingModel,
    QuboModel,
    ising_energy,
    ising_to_max2xor,
    ising_to_qubo,
    max2xor_to_ising,
    max2xor_to_qubo,
    qubo_to_ising,
    qubo_to_max2xor,
    qubo_value,
    to_spins,
)
from xorgadget_hub.core.formula import Clause, CnfFormula
from xorgadget_hub.core.gadgets import TreeShape
from xorgadget_hub.core.max2xor import Assignment, evaluate, exhaustive_opt
from xorgadget_hub.core.verify import AnnealSchedule, anneal_solve, check_opt_cost_relation, check_tree_lemma

pytestmark = pytest.mark.slow


def _three_clauses(num_vars: int) -> list[Clause]:
    clauses = []
    for scope in combinations(range(1, num_vars + 1), 3):
        for signs in range(8):
            clauses.append(Clause.of(*(var if (signs >> i) & 1 else -var for i, var in enumerate(scope))))
    return clauses


def _random_formula(rng, num_vars: int, num_clauses: int) -> CnfFormula:
    pool = _three_clauses(num_vars)
    picked = rng.choice(len(pool), size=num_clauses, replace=False)
    return CnfFormula(num_vars, tuple(pool[int(index)] for index in picked))


def _small_formulas() -> list[CnfFormula]:
    """Every 3-CNF formula over 4 variables with 1 to 4 distinct clauses"""
    pool = _three_clauses(4)
    return [CnfFormula(4, clauses) for size in range(1, 5) for clauses in combinations(pool, size)]


@pytest.mark.parametrize("strategy", ["3+:tree", "3+:chancellor"])
def test_relations_on_small_three_cnf_formulas(strategy):
    formulas = _small_formulas()
    assert len(formulas) == 32 + 496 + 4960 + 35960
    for formula in formulas:
        report = check_opt_cost_relation(formula, strategy)
        assert report.compiled_opt == report.predicted_opt
        assert report.compiled_cost == report.predicted_cost
        assert report.predicted_unsat == (not report.satisfiable)



@pytest.mark.parametrize("k", range(2, 11))
def test_tree_lemma_on_many_shapes(k):
    rng = np.random.default_rng(k)
    shapes = [TreeShape.comb(k), TreeShape.balanced(k)] + [TreeShape.random(k, rng) for _ in range(5)]
    for shape in shapes:
        report = check_tree_lemma(k, shape)
        assert report.num_constraints == 3 * (k - 1)
        assert report.max_satisfied == 2 * (k - 1)
        assert report.falsified_root_true_max == 2 * (k - 2)


def _random_fraction(rng) -> Fraction:
    return Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 5)))


def _random_qubo(rng) -> QuboModel:
    num_vars = int(rng.integers(1, 9))
    linear = {var: _random_fraction(rng) for var in range(1, num_vars + 1) if rng.random() < 0.8}
    quadratic = {pair: _random_fraction(rng) for pair in combinations(range(1, num_vars + 1), 2) if rng.random() < 0.5}
    return QuboModel(num_vars, linear, quadratic, _random_fraction(rng))


def _random_ising(rng) -> IsingModel:
    num_vars = int(rng.integers(1, 9))
    biases = {var: _random_fraction(rng) for var in range(1, num_vars + 1) if rng.random() < 0.8}
    couplings = {pair: _random_fraction(rng) for pair in combinations(range(1, num_vars + 1), 2) if rng.random() < 0.5}
    return IsingModel(num_vars, biases, couplings, _random_fraction(rng))


def test_qubo_conversions_on_random_models():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        qubo = _random_qubo(rng)
        assert ising_to_qubo(qubo_to_ising(qubo)) == qubo
        problem = qubo_to_max2xor(qubo)
        shifts = set()
        for value in range(1 << qubo.num_vars):
            assignment = Assignment.from_int(value, qubo.num_vars)
            shifts.add(qubo_value(qubo, assignment) - evaluate(problem, assignment).falsified)
        assert len(shifts) == 1


def test_ising_conversions_on_random_models():
    rng = np.random.default_rng(100)
    for _ in range(1000):
        ising = _random_ising(rng)
        assert qubo_to_ising(ising_to_qubo(ising)) == ising
        problem, shift = ising_to_max2xor(ising)
        back = max2xor_to_ising(problem)
        for value in range(1 << ising.num_vars):
            assignment = Assignment.from_int(value, ising.num_vars)
            spins = to_spins(assignment, ising.num_vars)
            falsified = evaluate(problem, assignment).falsified
            assert ising_energy(ising, spins) == falsified + shift
            assert ising_energy(back, spins) == falsified


def test_compiled_conversions_agree():
    rng = np.random.default_rng(101)
    for _ in range(200):
        formula = _random_formula(rng, int(rng.integers(3, 6)), int(rng.integers(1, 4)))
        problem = compile_cnf(formula, "3+:tree").problem
        qubo = max2xor_to_qubo(problem)
        ising = max2xor_to_ising(problem)
        assert qubo_to_ising(qubo) == ising
        value = int(rng.integers(0, 1 << problem.num_vars))
        assignment = Assignment.from_int(value, problem.num_vars)
        falsified = evaluate(problem, assignment).falsified
        assert qubo_value(qubo, assignment) == falsified
        assert ising_energy(ising, to_spins(assignment, problem.num_vars)) == falsified



def test_anneal_matches_exhaustive_cost():
    rng = np.random.default_rng(2023)
    schedule = AnnealSchedule(sweeps=400, restarts=10)
    for seed in range(50):
        formula = _random_formula(rng, 6, int(rng.integers(4, 9)))
        problem = compile_cnf(formula, "3+:tree").problem
        assert problem.num_vars <= 20
        assert anneal_solve(problem, schedule, seed=seed).value == exhaustive_opt(problem).cost
