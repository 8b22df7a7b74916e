"""
Gadget certification for the gadget compiler.
This module measures alpha, beta, strictness and the energy gap of a gadget
by enumerating every input assignment and every auxiliary extension.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Protocol, Sequence

import numpy as np

from xorgadget_hub.core.convert import energy_gap
from xorgadget_hub.core.enumeration import ValueTable, clause_counts
from xorgadget_hub.core.exceptions import EnumerationLimitError, GapUndefinedError, NotAGadgetError
from xorgadget_hub.infra.settings import settings


class SourceConstraint(Protocol):
    """What a gadget replaces: a clause or a definitional equivalence"""

    @property
    def variables(self) -> tuple[int, ...]: ...

    def is_satisfied(self, values: Mapping[int, int]) -> bool: ...


@dataclass(frozen=True)
class AssignmentRow:
    """Best auxiliary extension of one input assignment"""

    bits: tuple[int, ...]
    satisfied: bool
    best: Fraction
    attains: bool

    def to_json(self) -> dict:
        return {
            "x": "".join(str(bit) for bit in self.bits),
            "satisfied": self.satisfied,
            "best": str(self.best),
            "attains": self.attains,
        }


@dataclass(frozen=True)
class GadgetCertificate:
    """
    Measured gadget parameters.

    `strict` requires alpha-1 to be reached for every falsifying input,
    `weakly_strict` for at least one. `attains` in a row means the best
    extension reaches alpha (satisfying) or alpha-1 (falsifying).
    """

    alpha: Fraction
    beta: Fraction
    strict: bool
    weakly_strict: bool
    gap: Fraction | None
    delta_e: Fraction | None
    offset: Fraction
    rows: tuple[AssignmentRow, ...]

    def summary(self) -> str:
        kind = "strict" if self.strict else "non-strict"
        gap = "n/a" if self.delta_e is None else str(self.delta_e)
        return f"({self.alpha},{self.beta})-gadget, {kind}, ΔE={gap}"

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "strict": self.strict,
            "weakly_strict": self.weakly_strict,
            "gap": None if self.gap is None else str(self.gap),
            "delta_e": None if self.delta_e is None else str(self.delta_e),
            "offset": str(self.offset),
            "per_assignment": [row.to_json() for row in self.rows],
        }


def _check_size(num_inputs: int, num_aux: int, var_limit: int | None):
    limit = settings.certify_var_limit if var_limit is None else var_limit
    if num_inputs + num_aux > limit:
        raise EnumerationLimitError(num_inputs + num_aux, limit)


def _input_rows(source: SourceConstraint, inputs: Sequence[int]) -> list[tuple[tuple[int, ...], bool]]:
    rows = []
    for index in range(1 << len(inputs)):
        bits = tuple((index >> position) & 1 for position in range(len(inputs)))
        rows.append((bits, bool(source.is_satisfied(dict(zip(inputs, bits))))))
    return rows


def _certificate(
    inputs: list[tuple[tuple[int, ...], bool]],
    best: Sequence[Fraction],
    beta: Fraction,
    delta_e: Fraction | None,
    offset: Fraction,
) -> GadgetCertificate:
    satisfying = [index for index, (_, satisfied) in enumerate(inputs) if satisfied]
    falsifying = [index for index, (_, satisfied) in enumerate(inputs) if not satisfied]
    if not satisfying:
        raise NotAGadgetError("the source constraint has no satisfying assignment", inputs[0][0])

    alpha = best[satisfying[0]]
    for index in satisfying:
        if best[index] != alpha:
            raise NotAGadgetError(
                f"satisfying assignments reach different maxima ({alpha} and {best[index]})", inputs[index][0]
            )
    for index in falsifying:
        if best[index] > alpha - 1:
            raise NotAGadgetError(f"falsifying assignment reaches {best[index]} > alpha-1 = {alpha - 1}", inputs[index][0])

    rows = tuple(
        AssignmentRow(bits, satisfied, best[index], best[index] == (alpha if satisfied else alpha - 1))
        for index, (bits, satisfied) in enumerate(inputs)
    )
    attained = [rows[index].attains for index in falsifying]
    return GadgetCertificate(
        alpha=alpha,
        beta=beta,
        strict=all(attained),
        weakly_strict=any(attained),
        gap=alpha - max(best[index] for index in falsifying) if falsifying else None,
        delta_e=delta_e,
        offset=offset,
        rows=rows,
    )


def certify_gadget(app, source: SourceConstraint, var_limit: int | None = None) -> GadgetCertificate:
    """
    Certify a gadget application against the constraint it replaces.

    Alpha and beta are measured on the constraint part; the fragment offset is
    reported separately.
    """
    inputs = list(app.clause_vars)
    aux = list(app.aux_vars)
    if set(source.variables) != set(inputs):
        raise ValueError(f"Source variables {source.variables} do not match gadget inputs {tuple(inputs)}")
    _check_size(len(inputs), len(aux), var_limit)
    fragment = app.constraints
    allowed = set(inputs) | set(aux)
    if not fragment.variables <= allowed:
        raise ValueError(f"Constraints mention variables outside {sorted(allowed)}")

    table = ValueTable(fragment.constraints, inputs + aux)
    values = table.values().reshape(1 << len(aux), 1 << len(inputs))
    best = [table.to_fraction(value) for value in values.max(axis=0)]
    try:
        delta_e = energy_gap(fragment)
    except GapUndefinedError:
        delta_e = None
    return _certificate(_input_rows(source, inputs), best, fragment.constraint_weight, delta_e, fragment.offset)


def certify_cnf_gadget(
    clauses: Sequence,
    source: SourceConstraint,
    inputs: Sequence[int],
    aux_vars: Sequence[int],
    var_limit: int | None = None,
) -> GadgetCertificate:
    """Certify a gadget whose output is a set of unit-weight clauses"""
    inputs = list(inputs)
    aux = list(aux_vars)
    _check_size(len(inputs), len(aux), var_limit)
    counts = clause_counts(clauses, inputs + aux).reshape(1 << len(aux), 1 << len(inputs))
    best = [Fraction(int(value)) for value in np.max(counts, axis=0)]
    return _certificate(_input_rows(source, inputs), best, Fraction(len(clauses)), None, Fraction(0))
