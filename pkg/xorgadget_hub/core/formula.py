"""
CNF formula model for the gadget compiler.
This module implements literals, clauses, formulas and the DIMACS reader/writer.
"""

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from xorgadget_hub.core.exceptions import DimacsFormatError, EmptyClauseError
from xorgadget_hub.logging_config import logger


@dataclass(frozen=True)
class Literal:
    """A variable or its negation"""

    var: int
    negated: bool = False

    def __post_init__(self):
        if not isinstance(self.var, int) or isinstance(self.var, bool):
            raise TypeError("Variable index must be an integer")
        if self.var < 1:
            raise ValueError(f"Variable index must be positive, got {self.var}")

    @classmethod
    def from_dimacs(cls, value: int) -> "Literal":
        if value == 0:
            raise ValueError("0 is the DIMACS clause terminator, not a literal")
        return cls(abs(value), value < 0)

    def to_dimacs(self) -> int:
        return -self.var if self.negated else self.var

    def value(self, bit: int) -> int:
        """Truth value of the literal when its variable takes `bit`"""
        return bit ^ int(self.negated)

    def sort_key(self) -> tuple[int, bool]:
        return (self.var, self.negated)

    def __str__(self) -> str:
        return f"¬x{self.var}" if self.negated else f"x{self.var}"


def normalize_literals(literals: Iterable[Literal]) -> tuple[Literal, ...] | None:
    """
    Sort literals by variable (positive first) and drop duplicates.

    Returns None when the literals form a tautology.
    """
    unique = sorted(set(literals), key=Literal.sort_key)
    variables = [literal.var for literal in unique]
    if len(variables) != len(set(variables)):
        return None
    return tuple(unique)


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals over distinct variables"""

    literals: tuple[Literal, ...]

    def __post_init__(self):
        literals = tuple(self.literals)
        object.__setattr__(self, "literals", literals)
        if not literals:
            raise ValueError("A clause must contain at least one literal")
        if len(set(literals)) != len(literals):
            raise ValueError("A clause must not repeat a literal")
        if len({literal.var for literal in literals}) != len(literals):
            raise ValueError("A clause must not contain a variable with both polarities")

    @classmethod
    def of(cls, *values: int) -> "Clause":
        """Build a clause from DIMACS-style signed integers, keeping their order"""
        return cls(tuple(Literal.from_dimacs(value) for value in values))

    @property
    def width(self) -> int:
        return len(self.literals)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(literal.var for literal in self.literals)

    def is_positive(self) -> bool:
        return not any(literal.negated for literal in self.literals)

    def is_satisfied(self, values: Mapping[int, int]) -> bool:
        """Evaluate the clause; `values` maps variable index to bit"""
        return any(literal.value(values[literal.var]) for literal in self.literals)

    def normalized(self) -> "Clause":
        return Clause(normalize_literals(self.literals))

    def to_dimacs(self) -> str:
        return " ".join(str(literal.to_dimacs()) for literal in self.literals) + " 0"

    def __str__(self) -> str:
        return " ∨ ".join(str(literal) for literal in self.literals)


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of clauses over variables 1..num_vars"""

    num_vars: int
    clauses: tuple[Clause, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.num_vars < 0:
            raise ValueError("Number of variables cannot be negative")
        for clause in self.clauses:
            for literal in clause.literals:
                if literal.var > self.num_vars:
                    raise ValueError(f"Literal {literal} exceeds the declared {self.num_vars} variables")

    @property
    def widths(self) -> set[int]:
        return {clause.width for clause in self.clauses}

    def count_satisfied(self, values: Mapping[int, int]) -> int:
        return sum(1 for clause in self.clauses if clause.is_satisfied(values))

    def is_satisfied(self, values: Mapping[int, int]) -> bool:
        return all(clause.is_satisfied(values) for clause in self.clauses)


@dataclass(frozen=True)
class DimacsReport:
    """Parsed formula together with what the reader noticed on the way"""

    formula: CnfFormula
    declared_clauses: int
    tautologies_dropped: int
    warnings: tuple[str, ...]


def _lines(text: str | TextIO) -> Iterable[str]:
    if isinstance(text, str):
        return io.StringIO(text)
    return text


def parse_dimacs_report(text: str | TextIO) -> DimacsReport:
    """Read DIMACS CNF and report dropped tautologies and count mismatches."""
    header: tuple[int, int] | None = None
    pending: list[Literal] = []
    clauses: list[Clause] = []
    warnings: list[str] = []
    dropped = 0
    lineno = 0

    for lineno, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsFormatError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsFormatError(f"malformed header '{line}'", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsFormatError(f"malformed header '{line}'", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsFormatError("negative counts in header", lineno)
            continue
        if header is None:
            raise DimacsFormatError("clause before the 'p cnf' header", lineno)

        for token in line.split():
            try:
                value = int(token)
            except ValueError:
                raise DimacsFormatError(f"invalid literal '{token}'", lineno) from None
            if value != 0:
                if abs(value) > header[0]:
                    raise DimacsFormatError(f"literal {value} exceeds {header[0]} variables", lineno)
                pending.append(Literal.from_dimacs(value))
                continue
            if not pending:
                raise EmptyClauseError(lineno)
            literals = normalize_literals(pending)
            pending = []
            if literals is None:
                dropped += 1
                warnings.append(f"line {lineno}: tautological clause dropped")
                continue
            clauses.append(Clause(literals))

    if header is None:
        raise DimacsFormatError("missing 'p cnf' header")
    if pending:
        raise DimacsFormatError("last clause is not terminated by 0", lineno)

    read = len(clauses) + dropped
    if read != header[1]:
        warnings.append(f"header declares {header[1]} clauses, found {read}")
    for message in warnings:
        logger.warning(message)

    return DimacsReport(
        formula=CnfFormula(header[0], tuple(clauses)),
        declared_clauses=header[1],
        tautologies_dropped=dropped,
        warnings=tuple(warnings),
    )


def parse_dimacs(text: str | TextIO) -> CnfFormula:
    """Read DIMACS CNF into a normalized formula"""
    return parse_dimacs_report(text).formula


def serialize_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines.extend(clause.to_dimacs() for clause in formula.clauses)
    return "\n".join(lines) + "\n"
