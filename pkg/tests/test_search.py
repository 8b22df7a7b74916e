from fractions import Fraction

import pytest

from xorgadget_hub.core.certify import certify_gadget
from xorgadget_hub.core.exceptions import SearchInfeasibleError, SearchLimitError
from xorgadget_hub.core.formula import Clause
from xorgadget_hub.core.gadgets import gadget_direct
from xorgadget_hub.search_service.model import SearchProblem
from xorgadget_hub.search_service.relaxation import GAP, WEIGHT, NodeRelaxation
from xorgadget_hub.search_service.searcher import Optimality, certify_optimality, search_gadget
from xorgadget_hub.search_service.symmetry import WitnessSymmetry, permute_bits


def test_search_problem_validation():
    with pytest.raises(ValueError):
        SearchProblem(1, 0)
    with pytest.raises(ValueError):
        SearchProblem(3, -1)
    with pytest.raises(SearchLimitError):
        SearchProblem(6, 0)
    with pytest.raises(SearchLimitError):
        SearchProblem(3, 4)


def test_search_pool():
    problem = SearchProblem(3, 1)
    assert problem.num_scopes == 10
    assert problem.pool_size == 20
    assert problem.aux_vars == (4,)
    assert problem.satisfaction.shape == (16, 20)
    assert problem.signs.shape == (16, 10)
    assert list(problem.falsifying_rows) == [0, 8]
    assert problem.required_inputs == list(range(8))
    assert SearchProblem(3, 1, strict_required=False).required_inputs == list(range(1, 8))


def test_weights_of_known_gadget():
    problem = SearchProblem(2, 0)
    weights = problem.weights_of(gadget_direct(Clause.of(1, 2)).constraints)
    assert sum(weights) == Fraction(3, 2)
    assert problem.witnesses(weights) == {x: 0 for x in range(4)}


def test_evaluate_known_gadget():
    problem = SearchProblem(2, 0)
    coefficients = problem.coefficients_of(gadget_direct(Clause.of(1, 2)).constraints)
    assert coefficients == (Fraction(-1, 2),) * 3
    candidate = problem.evaluate(coefficients)
    assert candidate.delta_e == 4
    assert candidate.weight == 3
    assert candidate.coefficients == (-1, -1, -1)
    restored = problem.gadget_constraints(candidate)
    assert sum(c.weight for c in restored.constraints) == Fraction(3, 2)


def test_evaluate_rejects_non_gadgets():
    problem = SearchProblem(2, 0)
    assert problem.evaluate([0, 0, 0]) is None
    # x1 alone: input 01 and 10 disagree
    assert problem.evaluate([-1, 0, 0]) is None
    # the falsifying input scores highest
    assert problem.evaluate([1, 1, 1]) is None


def test_relaxation_with_all_witnesses():
    problem = SearchProblem(2, 0)
    relaxation = NodeRelaxation(problem, GAP)
    witnesses = {x: 0 for x in range(4)}
    solution = relaxation.solve(witnesses)
    assert solution.is_optimal
    assert solution.value == pytest.approx(4)
    assert 4 <= solution.bound <= 4 + Fraction(1, 1000)
    assert 4 <= relaxation.exact_bound(witnesses, solution) <= solution.bound
    exact = relaxation.exact_solve(witnesses, solution)
    assert exact.value == 4
    assert problem.evaluate(exact.x[: problem.num_scopes]).delta_e == 4


def test_relaxation_bound_is_rigorous():
    problem = SearchProblem(3, 1)
    relaxation = NodeRelaxation(problem, GAP)
    solution = relaxation.solve({})
    assert solution.is_optimal
    assert solution.bound >= Fraction(solution.value) - Fraction(1, 10**6)
    assert relaxation.exact_bound({}, solution) >= solution.value - 1e-6


def test_weight_relaxation():
    problem = SearchProblem(2, 0)
    relaxation = NodeRelaxation(problem, WEIGHT, gap_floor=Fraction(4))
    solution = relaxation.solve({x: 0 for x in range(4)})
    assert solution.is_optimal
    assert solution.value == pytest.approx(-3)
    assert -3 <= solution.bound <= -3 + Fraction(1, 1000)
    infeasible = NodeRelaxation(problem, WEIGHT, gap_floor=Fraction(5)).solve({x: 0 for x in range(4)})
    assert not infeasible.is_optimal


def test_permute_bits():
    assert permute_bits(0b011, (2, 0, 1)) == 0b101
    assert permute_bits(0, (1, 0)) == 0


def test_witness_order_and_patterns():
    symmetry = WitnessSymmetry(SearchProblem(3, 2))
    assert symmetry.order == [0, 1, 2, 4, 7, 3, 5, 6]
    assert [len(group) for group in symmetry.classes] == [1, 3, 1, 3]
    assert symmetry.patterns(0, {}) == [0]
    assert symmetry.patterns(2, {0: 0, 1: 2}) == [2, 3]
    assert symmetry.patterns(7, {}) == [0, 1, 2, 3]


def test_witness_leaders():
    symmetry = WitnessSymmetry(SearchProblem(3, 2))
    assert symmetry.is_leader({0: 0, 1: 0, 2: 1, 4: 3}, 4)
    # swapping the aux variables maps pattern 2 to 1
    assert not symmetry.is_leader({0: 0, 1: 0, 2: 2, 4: 3}, 4)
    # negating the first aux variable turns the falsifying witness into 0
    assert not symmetry.is_leader({0: 1, 1: 0, 2: 0, 4: 0}, 4)
    assert symmetry.completes_class({0: 0, 1: 0, 2: 1, 4: 3}, 4)
    assert not symmetry.completes_class({0: 0, 1: 0, 2: 1}, 2)


def test_exact_search_width_two():
    result = search_gadget(SearchProblem(2, 0))
    assert result.delta_e == 4
    assert (result.alpha, result.beta) == (1, Fraction(3, 2))
    assert result.optimal
    assert result.method == "exact"
    certificate = certify_gadget(result.gadget, Clause.of(1, 2))
    assert certificate.strict
    assert certificate.delta_e == 4


def test_heuristic_search_width_two():
    result = search_gadget(SearchProblem(2, 0), heuristic=True)
    assert result.delta_e == 4
    assert not result.optimal
    assert result.method == "heuristic"


def test_search_result_json():
    data = search_gadget(SearchProblem(2, 0)).to_json()
    assert data["name"] == "search-k2-a0"
    assert (data["width"], data["num_aux"]) == (2, 0)
    assert data["params"]["delta_e"] == "4"


def test_certify_optimality():
    problem = SearchProblem(2, 0)
    assert certify_optimality(problem, 4) is Optimality.PROVEN
    assert certify_optimality(problem, 5) is Optimality.REFUTED
    assert certify_optimality(problem, Fraction(7, 2)) is Optimality.REFUTED
    assert certify_optimality(problem, 4, heuristic=True) is Optimality.UNKNOWN


@pytest.mark.slow
@pytest.mark.parametrize(
    "k, num_aux, alpha, beta, delta_e",
    [
        (3, 1, 2, 3, 4),
        (4, 1, 6, 10, 2),
        (4, 2, 3, Fraction(9, 2), 4),
        (5, 2, 10, Fraction(52, 3), Fraction(12, 5)),
        (5, 3, 4, 6, 4),
    ],
)
def test_exact_search_optimal_gadgets(k, num_aux, alpha, beta, delta_e):
    result = search_gadget(SearchProblem(k, num_aux))
    assert result.optimal
    assert (result.alpha, result.beta, result.delta_e) == (alpha, beta, delta_e)
    certificate = certify_gadget(result.gadget, Clause.of(*range(1, k + 1)))
    assert certificate.strict
    assert certificate.delta_e == delta_e


@pytest.mark.slow
def test_no_gadget_for_width_five_with_one_aux():
    with pytest.raises(SearchInfeasibleError):
        search_gadget(SearchProblem(5, 1))


@pytest.mark.slow
@pytest.mark.parametrize("k, num_aux, delta_e", [(3, 1, 4), (4, 1, 2)])
def test_certify_optimality_of_known_gaps(k, num_aux, delta_e):
    problem = SearchProblem(k, num_aux)
    assert certify_optimality(problem, delta_e) is Optimality.PROVEN
    assert certify_optimality(problem, delta_e + 1) is Optimality.REFUTED
