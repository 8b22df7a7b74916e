"""
Custom exceptions for the gadget compiler.
This module defines custom exceptions used throughout the application.
"""


class DimacsFormatError(Exception):
    """Raised when a DIMACS CNF file cannot be read"""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.reason = message
        location = f"line {line}: " if line is not None else ""
        super().__init__(f"DIMACS error, {location}{message}")


class EmptyClauseError(DimacsFormatError):
    """Raised for a zero-length clause, which makes the formula trivially unsatisfiable"""

    def __init__(self, line: int | None = None):
        super().__init__("empty clause (formula is trivially unsatisfiable)", line)


class ModelFormatError(Exception):
    """Raised when a model file (m2x, QUBO, Ising, graph) is malformed"""

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"Malformed {kind} input: {message}")


class EnumerationLimitError(Exception):
    """Raised when exhaustive enumeration would exceed the configured bound"""

    def __init__(self, num_vars: int, limit: int):
        self.num_vars = num_vars
        self.limit = limit
        super().__init__(f"Enumeration over {num_vars} variables exceeds the limit of {limit}")


class UnsupportedWidthError(Exception):
    """Raised when a gadget cannot be applied to a clause of the given width"""

    def __init__(self, gadget: str, width: int, expected: str):
        self.gadget = gadget
        self.width = width
        super().__init__(f"Gadget '{gadget}' does not support width {width} (expected {expected})")


class UnknownGadgetError(Exception):
    """Raised when a gadget name is not in the catalog"""
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Gadget '{name}' not found")


class StrategyError(Exception):
    """Raised for malformed strategy strings or widths without a gadget"""

    def __init__(self, message: str):
        super().__init__(f"Strategy error: {message}")


class FamilyMismatchError(Exception):
    """Raised when composing gadgets whose constraint families do not chain"""

    def __init__(self, produced: str, consumed: str):
        self.produced = produced
        self.consumed = consumed
        super().__init__(f"Cannot compose: first gadget produces '{produced}', second consumes '{consumed}'")


class NotAGadgetError(Exception):
    """Raised when a constraint set violates the (alpha, beta)-gadget definition"""

    def __init__(self, reason: str, witness: tuple[int, ...]):
        self.reason = reason
        self.witness = witness
        bits = "".join(str(bit) for bit in witness)
        super().__init__(f"Not a gadget: {reason} (x-assignment {bits})")


class GapUndefinedError(Exception):
    """Raised when an energy gap is requested for an all-zero model"""

    def __init__(self):
        super().__init__("Energy gap is undefined for a model without nonzero coefficients")


class EmbeddingError(Exception):
    """Raised when some constraints cannot be routed on the coupling graph"""

    def __init__(self, failures: list, report=None):
        self.failures = failures
        self.report = report
        listed = ", ".join(str(failure) for failure in failures)
        super().__init__(f"{len(failures)} constraint(s) could not be embedded: {listed}")


class VerificationError(Exception):
    """Raised when a verified statement does not hold"""

    def __init__(self, statement: str, details: str):
        self.statement = statement
        self.details = details
        super().__init__(f"Verification failed for '{statement}': {details}")


class SearchInfeasibleError(Exception):
    """Raised when no gadget exists for a search specification"""

    def __init__(self, k: int, num_aux: int):
        self.k = k
        self.num_aux = num_aux
        super().__init__(f"No gadget exists for width {k} with {num_aux} auxiliary variable(s)")


class SearchLimitError(Exception):
    """Raised when a search specification is outside the supported sizes"""

    def __init__(self, message: str):
        super().__init__(f"Search limit exceeded: {message}")
