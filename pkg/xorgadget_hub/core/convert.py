"""
Model conversions for the gadget compiler.
This module implements exact translations between Max2XOR, QUBO and Ising
models, energy-gap computation, range normalisation and the Landau-Zener
success estimate.

Spin convention: boolean true is spin +1, false is spin -1.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from xorgadget_hub.core.exceptions import GapUndefinedError, ModelFormatError, VerificationError
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint, simplify, to_fraction

SPIN_CONVENTION = "true=+1"

Pair = tuple[int, int]


def _clean_linear(values: Mapping[int, object]) -> dict[int, Fraction]:
    cleaned = {}
    for var in sorted(values):
        value = to_fraction(values[var])
        if value != 0:
            cleaned[int(var)] = value
    return cleaned


def _clean_quadratic(values: Mapping[Pair, object]) -> dict[Pair, Fraction]:
    merged: dict[Pair, Fraction] = defaultdict(Fraction)
    for (first, second), value in values.items():
        if first == second:
            raise ValueError(f"Quadratic term needs two distinct variables, got ({first}, {second})")
        merged[(min(first, second), max(first, second))] += to_fraction(value)
    return {pair: merged[pair] for pair in sorted(merged) if merged[pair] != 0}


def _check_vars(num_vars: int, linear: Mapping[int, Fraction], quadratic: Mapping[Pair, Fraction]):
    used = set(linear) | {var for pair in quadratic for var in pair}
    if used and (min(used) < 1 or max(used) > num_vars):
        raise ValueError(f"Model variables must lie in 1..{num_vars}")


@dataclass(frozen=True)
class QuboModel:
    """sum_i a_i x_i + sum_{i<j} b_ij x_i x_j + offset over x in {0,1}"""

    num_vars: int
    linear: dict[int, Fraction] = field(default_factory=dict)
    quadratic: dict[Pair, Fraction] = field(default_factory=dict)
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "linear", _clean_linear(self.linear))
        object.__setattr__(self, "quadratic", _clean_quadratic(self.quadratic))
        object.__setattr__(self, "offset", to_fraction(self.offset))
        _check_vars(self.num_vars, self.linear, self.quadratic)

    def to_text(self) -> str:
        lines = [
            "c xorgadget qubo",
            f"c offset {self.offset}",
            f"p qubo 0 {self.num_vars} {len(self.linear)} {len(self.quadratic)}",
        ]
        lines.extend(f"{var} {var} {value}" for var, value in self.linear.items())
        lines.extend(f"{first} {second} {value}" for (first, second), value in self.quadratic.items())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "QuboModel":
        header = None
        offset = Fraction(0)
        linear: dict[int, Fraction] = {}
        quadratic: dict[Pair, Fraction] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts:
                continue
            try:
                if parts[0] == "c":
                    if len(parts) == 3 and parts[1] == "offset":
                        offset = Fraction(parts[2])
                    continue
                if parts[0] == "p":
                    if len(parts) != 6 or parts[1] != "qubo":
                        raise ModelFormatError("qubo", f"line {lineno}: malformed header")
                    header = int(parts[3])
                    continue
                if header is None:
                    raise ModelFormatError("qubo", f"line {lineno}: coefficient before header")
                first, second, value = int(parts[0]), int(parts[1]), Fraction(parts[2])
            except (ValueError, IndexError, ZeroDivisionError):
                raise ModelFormatError("qubo", f"line {lineno}: '{raw.strip()}'") from None
            if first == second:
                linear[first] = linear.get(first, Fraction(0)) + value
            else:
                pair = (min(first, second), max(first, second))
                quadratic[pair] = quadratic.get(pair, Fraction(0)) + value
        if header is None:
            raise ModelFormatError("qubo", "missing 'p qubo' header")
        return cls(header, linear, quadratic, offset)


@dataclass(frozen=True)
class IsingModel:
    """sum_i h_i z_i + sum_{i<j} J_ij z_i z_j + offset over z in {-1,+1}"""

    num_vars: int
    biases: dict[int, Fraction] = field(default_factory=dict)
    couplings: dict[Pair, Fraction] = field(default_factory=dict)
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "biases", _clean_linear(self.biases))
        object.__setattr__(self, "couplings", _clean_quadratic(self.couplings))
        object.__setattr__(self, "offset", to_fraction(self.offset))
        _check_vars(self.num_vars, self.biases, self.couplings)

    @property
    def coefficients(self) -> list[Fraction]:
        return [*self.biases.values(), *self.couplings.values()]

    def is_empty(self) -> bool:
        return not self.biases and not self.couplings

    def scaled(self, factor: Fraction) -> "IsingModel":
        return IsingModel(
            self.num_vars,
            {var: value * factor for var, value in self.biases.items()},
            {pair: value * factor for pair, value in self.couplings.items()},
            self.offset * factor,
        )

    def to_json(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "offset": str(self.offset),
            "h": [[var, str(value)] for var, value in self.biases.items()],
            "J": [[first, second, str(value)] for (first, second), value in self.couplings.items()],
            "spin_convention": SPIN_CONVENTION,
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsingModel":
        if data.get("spin_convention", SPIN_CONVENTION) != SPIN_CONVENTION:
            raise ModelFormatError("ising", f"unsupported spin convention {data['spin_convention']!r}")
        try:
            return cls(
                int(data["num_vars"]),
                {int(var): Fraction(str(value)) for var, value in data.get("h", [])},
                {(int(first), int(second)): Fraction(str(value)) for first, second, value in data.get("J", [])},
                Fraction(str(data.get("offset", "0"))),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError("ising", str(e)) from e


def to_spins(values: Mapping[int, int], num_vars: int) -> dict[int, int]:
    """Spin state of a boolean assignment"""
    return {var: 1 if values[var] else -1 for var in range(1, num_vars + 1)}


def max2xor_to_qubo(problem: Max2XorProblem) -> QuboModel:
    """
    QUBO whose value on every assignment equals the falsified weight.
    """
    linear: dict[int, Fraction] = defaultdict(Fraction)
    quadratic: dict[Pair, Fraction] = defaultdict(Fraction)
    offset = problem.offset
    for constraint in problem.constraints:
        weight = constraint.weight
        if constraint.is_unary:
            (var,) = constraint.scope
            if constraint.rhs == 0:
                linear[var] += weight
            else:
                linear[var] -= weight
                offset += weight
            continue
        first, second = constraint.scope
        if constraint.rhs == 0:
            linear[first] += weight
            linear[second] += weight
            quadratic[(first, second)] -= 2 * weight
        else:
            linear[first] -= weight
            linear[second] -= weight
            quadratic[(first, second)] += 2 * weight
            offset += weight
    return QuboModel(problem.num_vars, linear, quadratic, offset)


def qubo_to_ising(model: QuboModel) -> IsingModel:
    biases: dict[int, Fraction] = defaultdict(Fraction)
    for var, value in model.linear.items():
        biases[var] += value / 2
    for (first, second), value in model.quadratic.items():
        biases[first] += value / 4
        biases[second] += value / 4
    offset = model.offset + sum(model.linear.values(), Fraction(0)) / 2 + sum(model.quadratic.values(), Fraction(0)) / 4
    couplings = {pair: value / 4 for pair, value in model.quadratic.items()}
    return IsingModel(model.num_vars, biases, couplings, offset)


def ising_to_qubo(model: IsingModel) -> QuboModel:
    linear: dict[int, Fraction] = defaultdict(Fraction)
    for var, value in model.biases.items():
        linear[var] += 2 * value
    for (first, second), value in model.couplings.items():
        linear[first] -= 2 * value
        linear[second] -= 2 * value
    offset = model.offset - sum(model.biases.values(), Fraction(0)) + sum(model.couplings.values(), Fraction(0))
    quadratic = {pair: 4 * value for pair, value in model.couplings.items()}
    return QuboModel(model.num_vars, linear, quadratic, offset)


def max2xor_to_ising(problem: Max2XorProblem) -> IsingModel:
    """
    Ising form of a Max2XOR problem.

    Without the offset the energy of every spin state is
    constraint_weight/2 - satisfied constraint weight; the offset makes the
    total energy equal the falsified weight.
    """
    biases: dict[int, Fraction] = defaultdict(Fraction)
    couplings: dict[Pair, Fraction] = defaultdict(Fraction)
    for constraint in problem.constraints:
        half = constraint.weight / 2
        if constraint.is_unary:
            (var,) = constraint.scope
            biases[var] += half if constraint.rhs == 0 else -half
        else:
            couplings[constraint.scope] += half if constraint.rhs == 1 else -half
    offset = problem.offset + problem.constraint_weight / 2
    return IsingModel(problem.num_vars, biases, couplings, offset)


def ising_to_max2xor(model: IsingModel) -> tuple[Max2XorProblem, Fraction]:
    """
    Max2XOR problem and shift with energy(z) = falsified(x) + shift.
    """
    constraints = []
    for var, value in model.biases.items():
        constraints.append(XorConstraint.unary(var, 0 if value > 0 else 1, 2 * abs(value)))
    for (first, second), value in model.couplings.items():
        constraints.append(XorConstraint.pair(first, second, 1 if value > 0 else 0, 2 * abs(value)))
    shift = model.offset - sum((abs(value) for value in model.coefficients), Fraction(0))
    return simplify(Max2XorProblem(model.num_vars, tuple(constraints))), shift


def qubo_to_max2xor(model: QuboModel) -> Max2XorProblem:
    """Max2XOR problem whose falsified weight differs from the QUBO value by a constant"""
    problem, _ = ising_to_max2xor(qubo_to_ising(model))
    return problem


def ising_energy(model: IsingModel, spins: Mapping[int, int], include_offset: bool = True) -> Fraction:
    energy = model.offset if include_offset else Fraction(0)
    for var, value in model.biases.items():
        energy += value * spins[var]
    for (first, second), value in model.couplings.items():
        energy += value * spins[first] * spins[second]
    return energy


def qubo_value(model: QuboModel, values: Mapping[int, int]) -> Fraction:
    total = model.offset
    for var, value in model.linear.items():
        total += value * values[var]
    for (first, second), value in model.quadratic.items():
        total += value * values[first] * values[second]
    return total


def energy_gap(model: IsingModel | Max2XorProblem) -> Fraction:
    """Smallest reciprocal magnitude over the nonzero coefficients"""
    if isinstance(model, Max2XorProblem):
        simplified = simplify(model)
        if not simplified.constraints:
            raise GapUndefinedError()
        xor_gap = min(2 / constraint.weight for constraint in simplified.constraints)
        ising_gap = energy_gap(max2xor_to_ising(simplified))
        if xor_gap != ising_gap:
            raise VerificationError("energy gap", f"Max2XOR form gives {xor_gap}, Ising form gives {ising_gap}")
        return xor_gap

    coefficients = model.coefficients
    if not coefficients:
        raise GapUndefinedError()
    return min(1 / abs(value) for value in coefficients)


def _headroom(value: Fraction, bounds: tuple) -> Fraction:
    low, high = (to_fraction(bound) for bound in bounds)
    if not low < 0 < high:
        raise ValueError(f"Range {bounds} must contain zero in its interior")
    return high / value if value > 0 else low / value


def normalize_to_ranges(
    model: IsingModel,
    h_range: tuple = (-1, 1),
    j_range: tuple = (-1, 1),
) -> tuple[IsingModel, Fraction]:
    """Scale the model by the largest factor keeping h and J inside their ranges"""
    if model.is_empty():
        raise ValueError("Cannot normalize a model without coefficients")
    headrooms = [_headroom(value, h_range) for value in model.biases.values()]
    headrooms += [_headroom(value, j_range) for value in model.couplings.values()]
    scale = min(headrooms)
    return model.scaled(scale), scale


def landau_zener_success(delta: float, c: float) -> float:
    """Probability of ending in the ground state, 1 - exp(-pi delta^2 / 4c)"""
    if c <= 0:
        raise ValueError("Sweep rate must be positive")
    if delta < 0:
        raise ValueError("Energy gap cannot be negative")
    return 1.0 - math.exp(-math.pi * delta * delta / (4.0 * c))
