from fractions import Fraction

import pytest

from xorgadget_hub.core.certify import certify_gadget
from xorgadget_hub.core.exceptions import EnumerationLimitError, NotAGadgetError
from xorgadget_hub.core.formula import Clause
from xorgadget_hub.core.gadgets import GadgetApplication, GadgetParams, gadget_bian_equivalence, gadget_reference
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint

PLACEHOLDER = GadgetParams("candidate", 1, 1)


def _candidate(clause_vars, aux_vars, *constraints) -> GadgetApplication:
    num_vars = max([*clause_vars, *aux_vars])
    return GadgetApplication(Max2XorProblem(num_vars, constraints), clause_vars, aux_vars, PLACEHOLDER)


def test_certificate_rows():
    certificate = certify_gadget(gadget_reference(Clause.of(1, 2, 3), "chancellor"), Clause.of(1, 2, 3))
    assert len(certificate.rows) == 8
    falsifying = certificate.rows[0]
    assert falsifying.bits == (0, 0, 0)
    assert not falsifying.satisfied
    assert falsifying.best == 2
    assert falsifying.attains
    assert all(row.best == 3 for row in certificate.rows[1:])
    assert certificate.summary() == "(3,5)-gadget, strict, ΔE=4"


def test_certificate_json():
    certificate = certify_gadget(gadget_reference(Clause.of(1, 2, 3), "trevisan"), Clause.of(1, 2, 3))
    data = certificate.to_json()
    assert data["alpha"] == "2"
    assert data["offset"] == "3/2"
    assert data["per_assignment"][0] == {"x": "000", "satisfied": False, "best": "1", "attains": True}


def test_non_strict_certificate_is_weakly_strict():
    app, source = gadget_bian_equivalence(1, 2, 3)
    certificate = certify_gadget(app, source)
    assert not certificate.strict
    assert certificate.weakly_strict
    assert certificate.gap == 1


def test_unequal_satisfying_maxima_are_rejected():
    app = _candidate((1, 2), (), XorConstraint.unary(1, 1, 1))
    with pytest.raises(NotAGadgetError) as excinfo:
        certify_gadget(app, Clause.of(1, 2))
    assert excinfo.value.witness in {(0, 1), (1, 1)}


def test_falsifying_assignment_above_alpha_is_rejected():
    app = _candidate((1,), (), XorConstraint.unary(1, 0, 1))
    with pytest.raises(NotAGadgetError):
        certify_gadget(app, Clause.of(1))


def test_auxiliary_variables_are_maximised():
    # b copies x1 ∨ x2 only through the best extension
    app = _candidate(
        (1, 2),
        (3,),
        XorConstraint.unary(3, 1, 1),
        XorConstraint.pair(1, 3, 0, Fraction(1, 2)),
        XorConstraint.pair(2, 3, 0, Fraction(1, 2)),
        XorConstraint.pair(1, 2, 1, Fraction(1, 2)),
    )
    certificate = certify_gadget(app, Clause.of(1, 2))
    assert [row.best for row in certificate.rows] == [1, 2, 2, 2]
    assert certificate.alpha == 2
    assert certificate.strict


def test_source_variables_must_match():
    app = gadget_reference(Clause.of(1, 2, 3), "chancellor")
    with pytest.raises(ValueError):
        certify_gadget(app, Clause.of(1, 2))


def test_enumeration_bound():
    app = gadget_reference(Clause.of(1, 2, 3), "chancellor")
    with pytest.raises(EnumerationLimitError):
        certify_gadget(app, Clause.of(1, 2, 3), var_limit=3)
