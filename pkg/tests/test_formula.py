import pytest

from xorgadget_hub.core.exceptions import DimacsFormatError, EmptyClauseError
from xorgadget_hub.core.formula import (
    Clause,
    CnfFormula,
    Literal,
    parse_dimacs,
    parse_dimacs_report,
    serialize_dimacs,
)


def test_literal_dimacs_conversion():
    assert Literal.from_dimacs(-3) == Literal(3, True)
    assert Literal(3, True).to_dimacs() == -3
    assert str(Literal(2, True)) == "¬x2"


def test_literal_rejects_bad_indices():
    with pytest.raises(ValueError):
        Literal(0)
    with pytest.raises(ValueError):
        Literal.from_dimacs(0)
    with pytest.raises(TypeError):
        Literal(True)


def test_clause_rejects_both_polarities():
    with pytest.raises(ValueError):
        Clause.of(1, -1)
    with pytest.raises(ValueError):
        Clause(())


def test_clause_evaluation():
    clause = Clause.of(1, -2)
    assert clause.is_satisfied({1: 0, 2: 0})
    assert not clause.is_satisfied({1: 0, 2: 1})
    assert clause.width == 2
    assert clause.variables == (1, 2)


def test_parse_sorts_literals_by_variable():
    formula = parse_dimacs("p cnf 3 2\n-2 1 0\n3 2 -1 0\n")
    assert formula.num_vars == 3
    assert formula.clauses == (Clause.of(1, -2), Clause.of(-1, 2, 3))


def test_parse_drops_tautologies_and_duplicates():
    report = parse_dimacs_report("p cnf 2 3\n1 -1 0\n1 1 2 0\n2 0\n")
    assert report.tautologies_dropped == 1
    assert report.formula.clauses == (Clause.of(1, 2), Clause.of(2))
    assert any("tautological" in warning for warning in report.warnings)


def test_parse_clause_spanning_lines():
    formula = parse_dimacs("c comment\np cnf 3 1\n1 2\n3 0\n")
    assert formula.clauses == (Clause.of(1, 2, 3),)


def test_parse_stops_at_percent_marker():
    formula = parse_dimacs("p cnf 2 1\n1 2 0\n%\n0\n")
    assert len(formula.clauses) == 1


def test_parse_warns_on_clause_count_mismatch():
    report = parse_dimacs_report("p cnf 2 3\n1 2 0\n")
    assert report.declared_clauses == 3
    assert report.warnings == ("header declares 3 clauses, found 1",)


def test_parse_errors():
    with pytest.raises(DimacsFormatError):
        parse_dimacs("1 2 0\n")
    with pytest.raises(DimacsFormatError):
        parse_dimacs("p cnf 2 1\n1 2\n")
    with pytest.raises(DimacsFormatError):
        parse_dimacs("p cnf 2 1\n1 3 0\n")
    with pytest.raises(DimacsFormatError):
        parse_dimacs("p cnf 2 1\n1 x 0\n")
    with pytest.raises(DimacsFormatError):
        parse_dimacs("p cnf 2\n")


def test_empty_clause_reports_line():
    with pytest.raises(EmptyClauseError) as excinfo:
        parse_dimacs("p cnf 2 2\n1 2 0\n0\n")
    assert excinfo.value.line == 3


def test_empty_formula():
    formula = parse_dimacs("p cnf 0 0\n")
    assert formula.num_vars == 0
    assert formula.clauses == ()


def test_serialize_writes_normalized_form():
    formula = parse_dimacs("p cnf 3 2\n-2 1 0\n3 -1 0\n")
    text = serialize_dimacs(formula)
    assert text == "p cnf 3 2\n1 -2 0\n-1 3 0\n"
    assert parse_dimacs(text) == formula


def test_formula_satisfaction(sat3_formula):
    values = {1: 1, 2: 1, 3: 0, 4: 0}
    assert sat3_formula.is_satisfied(values)
    assert sat3_formula.count_satisfied({1: 0, 2: 0, 3: 0, 4: 0}) == 2
    assert sat3_formula.widths == {3}


def test_formula_rejects_out_of_range_literals():
    with pytest.raises(ValueError):
        CnfFormula(2, (Clause.of(1, 3),))
