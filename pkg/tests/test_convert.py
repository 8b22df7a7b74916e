import math
from fractions import Fraction

import numpy as np
import pytest

from xorgadget_hub.core.convert import (
    IsingModel,
    QuboModel,
    energy_gap,
    ising_energy,
    ising_to_max2xor,
    ising_to_qubo,
    landau_zener_success,
    max2xor_to_ising,
    max2xor_to_qubo,
    normalize_to_ranges,
    qubo_to_ising,
    qubo_to_max2xor,
    qubo_value,
    to_spins,
)
from xorgadget_hub.core.exceptions import GapUndefinedError, ModelFormatError
from xorgadget_hub.core.formula import Clause
from xorgadget_hub.core.gadgets import gadget_direct
from xorgadget_hub.core.max2xor import Assignment, Max2XorProblem, XorConstraint, evaluate, simplify

HALF = Fraction(1, 2)


def _states(num_vars: int):
    for value in range(1 << num_vars):
        assignment = Assignment.from_int(value, num_vars)
        yield assignment, to_spins(assignment, num_vars)


def _random_problem(rng, num_vars: int) -> Max2XorProblem:
    constraints = []
    for _ in range(int(rng.integers(1, 10))):
        if num_vars > 1 and rng.random() < 0.5:
            first, second = sorted(int(var) for var in rng.choice(np.arange(1, num_vars + 1), 2, replace=False))
            scope = (first, second)
        else:
            scope = (int(rng.integers(1, num_vars + 1)),)
        constraints.append(XorConstraint(scope, int(rng.integers(0, 2)), Fraction(int(rng.integers(1, 9)), 4)))
    return simplify(Max2XorProblem(num_vars, tuple(constraints)))


def test_worked_example_to_qubo(worked_example):
    qubo = max2xor_to_qubo(worked_example)
    assert qubo.linear == {1: 2, 2: 1}
    assert qubo.quadratic == {(1, 2): -2}
    assert qubo.offset == 0


def test_worked_example_to_ising(worked_example):
    ising = qubo_to_ising(max2xor_to_qubo(worked_example))
    assert ising.biases == {1: HALF}
    assert ising.couplings == {(1, 2): -HALF}
    assert ising.offset == 1
    assert max2xor_to_ising(worked_example) == ising


def test_every_form_values_the_falsified_weight():
    rng = np.random.default_rng(3)
    for _ in range(100):
        num_vars = int(rng.integers(1, 6))
        problem = _random_problem(rng, num_vars)
        qubo = max2xor_to_qubo(problem)
        ising = max2xor_to_ising(problem)
        assert qubo_to_ising(qubo) == ising
        for assignment, spins in _states(num_vars):
            falsified = evaluate(problem, assignment).falsified
            assert qubo_value(qubo, assignment) == falsified
            assert ising_energy(ising, spins) == falsified


def test_ising_to_max2xor_shift():
    ising = IsingModel(3, {1: Fraction(3, 4), 3: -1}, {(1, 2): HALF, (2, 3): Fraction(-1, 8)}, Fraction(2))
    problem, shift = ising_to_max2xor(ising)
    assert problem.is_simplified()
    for assignment, spins in _states(3):
        assert ising_energy(ising, spins) == evaluate(problem, assignment).falsified + shift


def test_qubo_to_max2xor_differs_by_a_constant():
    qubo = QuboModel(2, {1: 3, 2: -1}, {(1, 2): Fraction(5, 2)}, 1)
    problem = qubo_to_max2xor(qubo)
    differences = {qubo_value(qubo, assignment) - evaluate(problem, assignment).falsified for assignment, _ in _states(2)}
    assert len(differences) == 1


def test_qubo_ising_round_trip():
    qubo = QuboModel(3, {1: 1, 3: Fraction(-2, 3)}, {(1, 3): 4, (2, 3): -1}, 5)
    assert ising_to_qubo(qubo_to_ising(qubo)) == qubo


def test_qubo_text_codec():
    qubo = QuboModel(2, {1: 2, 2: 1}, {(1, 2): -2})
    text = qubo.to_text()
    assert "p qubo 0 2 2 1" in text
    assert "1 2 -2" in text
    assert QuboModel.from_text(text) == qubo
    with pytest.raises(ModelFormatError):
        QuboModel.from_text("1 1 2\n")


def test_ising_json_codec():
    ising = IsingModel(2, {1: HALF}, {(1, 2): -HALF}, 1)
    data = ising.to_json()
    assert data["spin_convention"] == "true=+1"
    assert IsingModel.from_json(data) == ising
    with pytest.raises(ModelFormatError):
        IsingModel.from_json({**data, "spin_convention": "true=-1"})


def test_models_reject_out_of_range_variables():
    with pytest.raises(ValueError):
        IsingModel(1, {2: 1})
    with pytest.raises(ValueError):
        QuboModel(2, {}, {(1, 1): 1})


def test_energy_gap(worked_example):
    assert energy_gap(worked_example) == 2
    assert energy_gap(max2xor_to_ising(worked_example)) == 2
    assert energy_gap(gadget_direct(Clause.of(1, 2)).constraints) == 4


def test_energy_gap_undefined_without_coefficients():
    with pytest.raises(GapUndefinedError):
        energy_gap(Max2XorProblem(2))
    with pytest.raises(GapUndefinedError):
        energy_gap(IsingModel(2, offset=3))


def test_normalize_direct_gadget_scales_by_four():
    ising = max2xor_to_ising(gadget_direct(Clause.of(1, 2)).constraints)
    normalized, scale = normalize_to_ranges(ising)
    assert scale == 4
    assert max(abs(value) for value in normalized.coefficients) == 1


def test_normalize_with_asymmetric_ranges():
    ising = max2xor_to_ising(gadget_direct(Clause.of(1, 2)).constraints)
    # biases are -1/4, the coupling is +1/4
    _, scale = normalize_to_ranges(ising, h_range=(-2, 1), j_range=(-1, HALF))
    assert scale == 2
    with pytest.raises(ValueError):
        normalize_to_ranges(ising, h_range=(0, 1))
    with pytest.raises(ValueError):
        normalize_to_ranges(IsingModel(1))


def test_landau_zener_success():
    assert landau_zener_success(2.0, 1.0) == pytest.approx(1 - math.exp(-math.pi))
    assert landau_zener_success(0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        landau_zener_success(1.0, 0.0)
