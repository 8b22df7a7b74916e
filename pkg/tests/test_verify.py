from fractions import Fraction

import pytest

from xorgadget_hub.core.catalog import compile_cnf
from xorgadget_hub.core.exceptions import EnumerationLimitError
from xorgadget_hub.core.formula import Clause, CnfFormula
from xorgadget_hub.core.gadgets import TreeShape
from xorgadget_hub.core.max2xor import Max2XorProblem, evaluate, exhaustive_opt
from xorgadget_hub.core.verify import AnnealSchedule, anneal_solve, check_opt_cost_relation, check_tree_lemma


def test_relation_on_satisfiable_formula(sat3_formula):
    report = check_opt_cost_relation(sat3_formula, "3+:tree")
    assert report.opt == 3
    assert report.cost == 0
    assert report.satisfiable
    assert report.compiled_opt == 6
    assert report.compiled_cost == 3
    assert not report.predicted_unsat
    assert all(statement.holds for statement in report.statements)


def test_relation_on_unsatisfiable_formula(unsat_formula):
    report = check_opt_cost_relation(unsat_formula)
    assert (report.opt, report.cost) == (1, 1)
    assert report.compiled_cost == 1
    assert report.predicted_unsat
    assert not report.satisfiable


def test_relation_with_clique_gadgets():
    formula = CnfFormula(4, (Clause.of(1, 2, 3, 4), Clause.of(-1, -2), Clause.of(-3, -4)))
    report = check_opt_cost_relation(formula, "1:unit,2:direct,3+:clique")
    assert report.all_strict
    assert report.compiled_opt == report.predicted_opt


def test_relation_respects_enumeration_limit(sat3_formula):
    with pytest.raises(EnumerationLimitError):
        check_opt_cost_relation(sat3_formula, "3+:tree", var_limit=5)


def test_relation_report_json(sat3_formula):
    data = check_opt_cost_relation(sat3_formula, "3+:tree").to_json()
    assert data["compiled_opt"] == "6"
    assert [statement["name"] for statement in data["statements"]] == [
        "opt equality",
        "cost equality",
        "unsat criterion",
    ]


@pytest.mark.parametrize("k", range(2, 7))
def test_tree_lemma(k):
    report = check_tree_lemma(k)
    assert report.num_constraints == 3 * (k - 1)
    assert report.max_satisfied == 2 * (k - 1)
    assert report.falsified_root_true_max == 2 * (k - 2)
    assert len(report.statements) == 5


def test_tree_lemma_with_balanced_shape():
    report = check_tree_lemma(6, TreeShape.balanced(6))
    assert report.shape == TreeShape.balanced(6).to_text()
    assert all(statement.holds for statement in report.statements)


def test_tree_lemma_bounds():
    with pytest.raises(EnumerationLimitError):
        check_tree_lemma(13)
    with pytest.raises(ValueError):
        check_tree_lemma(1)
    with pytest.raises(ValueError):
        check_tree_lemma(4, TreeShape.comb(5))


def test_anneal_finds_the_optimum_of_a_compiled_formula(sat3_formula):
    problem = compile_cnf(sat3_formula, "3+:tree").problem
    result = anneal_solve(problem, seed=7)
    assert result.value == exhaustive_opt(problem).cost
    assert evaluate(problem, result.assignment).falsified == result.value


def test_anneal_is_reproducible(sat3_formula):
    problem = compile_cnf(sat3_formula, "3+:tree").problem
    schedule = AnnealSchedule(sweeps=20, restarts=2)
    first = anneal_solve(problem, schedule, seed=11)
    second = anneal_solve(problem, schedule, seed=11)
    assert first == second


def test_anneal_trace_never_increases(worked_example):
    result = anneal_solve(worked_example, AnnealSchedule(sweeps=30, restarts=3), seed=1)
    assert len(result.trace) == 90
    assert all(later <= earlier for earlier, later in zip(result.trace, result.trace[1:]))
    assert result.trace[-1] == pytest.approx(float(result.value))


def test_anneal_empty_model():
    result = anneal_solve(Max2XorProblem(3, (), Fraction(2)))
    assert result.assignment.bits == (0, 0, 0)
    assert result.value == 2
    assert result.trace == ()


def test_anneal_schedule_validation():
    with pytest.raises(ValueError):
        AnnealSchedule(sweeps=0)
    with pytest.raises(ValueError):
        AnnealSchedule(t_start=0.01, t_end=0.1)
    assert AnnealSchedule.from_settings().sweeps == 400


@pytest.mark.parametrize("k", [4, 5])
def test_relation_with_chain_gadgets(k):
    formula = CnfFormula(k, (Clause.of(*range(1, k + 1)),))
    report = check_opt_cost_relation(formula, f"{k}:chain-trevisan")
    assert report.satisfiable
    assert report.compiled_opt == report.predicted_opt == 2 * (k - 2)
    assert report.compiled_cost == report.predicted_cost == k - 2
    assert all(statement.holds for statement in report.statements)
