from fractions import Fraction

import pytest

from xorgadget_hub.core.catalog import (
    compile_cnf,
    dump_catalog,
    get_gadget,
    is_known_gadget,
    parse_strategy,
    strategy_for_gadget,
)
from xorgadget_hub.core.exceptions import StrategyError, UnknownGadgetError, UnsupportedWidthError
from xorgadget_hub.core.formula import Clause, CnfFormula
from xorgadget_hub.core.gadgets import VariableAllocator


def test_strategy_resolution():
    strategy = parse_strategy("1:unit,2:direct,3:tree,4+:tree-balanced")
    assert strategy.resolve(2) == "direct"
    assert strategy.resolve(3) == "tree"
    assert strategy.resolve(9) == "tree-balanced"
    assert strategy.to_text() == "1:unit,2:direct,3:tree,4+:tree-balanced"


def test_open_ended_rule_with_largest_floor_wins():
    strategy = parse_strategy("3+:tree,5+:chain-trevisan")
    assert strategy.resolve(4) == "tree"
    assert strategy.resolve(6) == "chain-trevisan"
    with pytest.raises(StrategyError):
        strategy.resolve(2)


@pytest.mark.parametrize("text", ["", "3tree", "3:mystery", "0:unit", "2:direct,2:unit", "x+:tree"])
def test_malformed_strategies(text):
    with pytest.raises(StrategyError):
        parse_strategy(text)


def test_strategy_for_gadget():
    assert strategy_for_gadget("clique").to_text() == "1:unit,2:direct,3+:clique"
    assert strategy_for_gadget("direct").to_text() == "1:unit,2:direct"


def test_gadget_lookup():
    assert is_known_gadget("chain-nusslein")
    assert is_known_gadget("tree:((1 2) 3)")
    assert not is_known_gadget("tree:((1 2)")
    with pytest.raises(UnknownGadgetError):
        get_gadget("mystery")


def test_explicit_tree_shape_gadget():
    gadget = get_gadget("tree:((1 2)(3 4))")
    app = gadget.apply(Clause.of(1, 2, 3, 4), VariableAllocator(5))
    assert app.aux_vars == (5, 6)
    with pytest.raises(UnsupportedWidthError):
        gadget.apply(Clause.of(1, 2, 3), VariableAllocator(4))


def test_compile_single_binary_clause():
    result = compile_cnf(CnfFormula(2, (Clause.of(1, 2),)), "1:unit,2:direct")
    assert len(result.problem.constraints) == 3
    assert result.sum_beta_minus_alpha == Fraction(1, 2)
    assert result.unsat_threshold == Fraction(3, 2)


def test_compile_width_five_clause_with_tree():
    result = compile_cnf(CnfFormula(5, (Clause.of(1, 2, 3, 4, 5),)), "3+:tree")
    assert len(result.problem.constraints) == 12
    assert result.num_aux == 3
    assert result.problem.num_vars == 8


def test_compile_numbers_aux_variables_after_formula(sat3_formula):
    result = compile_cnf(sat3_formula, "3+:tree")
    assert [app.aux_vars for app in result.applications] == [(5,), (6,), (7,)]
    assert result.sum_alpha_minus_one == 3
    assert result.sum_beta_minus_alpha == 3
    assert result.expected_opt_if_satisfiable == 6
    assert result.all_strict


def test_compile_unsat_pair_cancels(unsat_formula):
    result = compile_cnf(unsat_formula)
    assert result.problem.constraints == ()
    assert result.problem.offset == 1
    assert result.unsat_threshold == 1


def test_compile_empty_formula():
    result = compile_cnf(CnfFormula(0, ()))
    assert result.problem.constraints == ()
    totals = result.to_json()["totals"]
    assert totals["num_clauses"] == 0
    assert totals["num_aux"] == 0
    assert totals["sum_beta_minus_alpha"] == "0"


def test_compile_rejects_unsupported_width():
    formula = CnfFormula(6, (Clause.of(1, 2, 3, 4, 5, 6),))
    with pytest.raises(UnsupportedWidthError):
        compile_cnf(formula, "3+:clique")


def test_compile_default_strategy_mixes_widths():
    formula = CnfFormula(4, (Clause.of(1), Clause.of(-1, 2), Clause.of(2, 3, -4)))
    result = compile_cnf(formula)
    names = [app.params.name for app in result.applications]
    assert names == ["unit", "direct", "tree"]


def test_dump_catalog_entries():
    entries = dump_catalog(["chancellor", "bian-equivalence"])
    assert [entry["name"] for entry in entries] == ["chancellor", "bian-equivalence"]
    chancellor, equivalence = entries
    assert chancellor["certified"]["alpha"] == "3"
    assert chancellor["certified"]["beta"] == "5"
    assert chancellor["paper_claimed"] is None
    assert equivalence["certified"]["strict"] is False


def test_dump_catalog_records_published_values():
    (entry,) = dump_catalog(["nusslein"])
    assert entry["paper_claimed"]["alpha"] == "5/2"
    assert entry["certified"]["alpha"] == "3"


def test_compile_chain_totals():
    formula = CnfFormula(4, (Clause.of(1, 2, 3, -4),))
    result = compile_cnf(formula, "4:chain-trevisan")
    (app,) = result.applications
    assert (app.params.alpha, app.params.beta) == (4, 6)
    assert result.expected_opt_if_satisfiable == 4
    assert result.unsat_threshold == 3
