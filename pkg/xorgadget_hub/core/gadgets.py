"""
Clause gadgets for the gadget compiler.
This module implements the gadgets that replace a clause by weighted XOR
constraints, negation rewriting, parameter composition and tree shapes.
"""

import math
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from xorgadget_hub.core.certify import certify_gadget
from xorgadget_hub.core.convert import energy_gap
from xorgadget_hub.core.exceptions import (
    FamilyMismatchError,
    GapUndefinedError,
    UnknownGadgetError,
    UnsupportedWidthError,
)
from xorgadget_hub.core.formula import Clause, Literal
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint, simplify
from xorgadget_hub.infra.settings import settings
from xorgadget_hub.logging_config import logger

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PaperClaim:
    """Parameters as published, kept when they disagree with certification"""

    alpha: Fraction
    beta: Fraction
    delta_e: Fraction | None

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "delta_e": None if self.delta_e is None else str(self.delta_e),
        }


@dataclass(frozen=True)
class GadgetParams:
    """
    (alpha, beta) parameters of a gadget.

    `source` and `target` name the constraint families the gadget reads and
    writes; composition checks that they chain. Several target families are
    joined with '|'.
    """

    name: str
    alpha: Fraction
    beta: Fraction
    delta_e: Fraction | None = None
    num_aux: int | None = None
    strict: bool = True
    source: str = "kSAT"
    target: str = "2XOR"
    paper_claimed: PaperClaim | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.delta_e is not None:
            object.__setattr__(self, "delta_e", Fraction(self.delta_e))
            if self.delta_e <= 0:
                raise ValueError("Energy gap must be positive")
        if not self.beta >= self.alpha > 0:
            raise ValueError(f"Expected beta >= alpha > 0, got alpha={self.alpha}, beta={self.beta}")
        if self.num_aux is not None and self.num_aux < 0:
            raise ValueError("Number of auxiliary variables cannot be negative")

    def caption(self) -> str:
        kind = "strict" if self.strict else "non-strict"
        gap = "n/a" if self.delta_e is None else str(self.delta_e)
        return f"({self.alpha},{self.beta})-gadget, {kind}, ΔE={gap}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "delta_e": None if self.delta_e is None else str(self.delta_e),
            "num_aux": self.num_aux,
            "strict": self.strict,
            "source": self.source,
            "target": self.target,
            "paper_claimed": None if self.paper_claimed is None else self.paper_claimed.to_json(),
        }


@dataclass(frozen=True)
class GadgetApplication:
    """A gadget instantiated on concrete clause and auxiliary variables"""

    constraints: Max2XorProblem
    clause_vars: tuple[int, ...]
    aux_vars: tuple[int, ...]
    params: GadgetParams

    def __post_init__(self):
        object.__setattr__(self, "clause_vars", tuple(self.clause_vars))
        object.__setattr__(self, "aux_vars", tuple(self.aux_vars))
        if set(self.clause_vars) & set(self.aux_vars):
            raise ValueError("Auxiliary variables must be distinct from clause variables")
        if not self.constraints.variables <= set(self.clause_vars) | set(self.aux_vars):
            raise ValueError("Gadget constraints mention foreign variables")


@dataclass(frozen=True)
class OrEquivalence:
    """Definitional constraint output <-> (first or second)"""

    first: int
    second: int
    output: int

    @property
    def variables(self) -> tuple[int, ...]:
        return (self.first, self.second, self.output)

    def is_satisfied(self, values: Mapping[int, int]) -> bool:
        return values[self.output] == (values[self.first] | values[self.second])

    def __str__(self) -> str:
        return f"x{self.output} ↔ x{self.first} ∨ x{self.second}"


@dataclass(frozen=True)
class LiteralConstraint:
    """XOR constraint written over literals, before negations are pushed into rhs"""

    literals: tuple[Literal, ...]
    rhs: int
    weight: Fraction


@dataclass(frozen=True)
class ParityTerm:
    """XOR constraint of any arity, used only by the naive expansion"""

    scope: tuple[int, ...]
    rhs: int
    weight: Fraction

    def is_satisfied(self, values: Mapping[int, int]) -> bool:
        parity = 0
        for var in self.scope:
            parity ^= values[var]
        return parity == self.rhs


class VariableAllocator:
    """Hands out fresh auxiliary variable indices in increasing order"""

    def __init__(self, first: int):
        if first < 1:
            raise ValueError("Variable indices start at 1")
        self._next = first
        self._first = first

    def allocate(self) -> int:
        var = self._next
        self._next += 1
        return var

    @property
    def last(self) -> int:
        """Largest index handed out so far (first-1 if none)"""
        return self._next - 1

    @property
    def count(self) -> int:
        return self._next - self._first


def rewrite_negations(constraints: Iterable[LiteralConstraint]) -> list[XorConstraint]:
    """Push literal negations into the right-hand side (¬x ⊕ C = k is x ⊕ C = 1-k)"""
    rewritten = []
    for constraint in constraints:
        flips = sum(1 for literal in constraint.literals if literal.negated)
        scope = tuple(literal.var for literal in constraint.literals)
        rewritten.append(XorConstraint(scope, constraint.rhs ^ (flips % 2), constraint.weight))
    return rewritten


def _positive(var: int) -> Literal:
    return Literal(var, False)


def _negate(literal: Literal) -> Literal:
    return Literal(literal.var, not literal.negated)


def _unary(literal: Literal, rhs: int, weight) -> LiteralConstraint:
    return LiteralConstraint((literal,), rhs, Fraction(weight))


def _pair(first: Literal, second: Literal, rhs: int, weight) -> LiteralConstraint:
    return LiteralConstraint((first, second), rhs, Fraction(weight))


def _fresh_allocator(clause: Clause, allocator: VariableAllocator | None) -> VariableAllocator:
    return allocator if allocator is not None else VariableAllocator(max(clause.variables) + 1)


def _application(
    clause_vars: Sequence[int],
    aux_vars: Sequence[int],
    constraints: Iterable[LiteralConstraint],
    params: GadgetParams,
) -> GadgetApplication:
    num_vars = max([*clause_vars, *aux_vars])
    fragment = simplify(Max2XorProblem(num_vars, tuple(rewrite_negations(constraints))))
    return GadgetApplication(fragment, tuple(clause_vars), tuple(aux_vars), params)


def _require_width(name: str, clause: Clause, allowed: bool, expected: str):
    if not allowed:
        raise UnsupportedWidthError(name, clause.width, expected)


# -- direct and naive gadgets ------------------------------------------------

def unit_params() -> GadgetParams:
    return GadgetParams("unit", 1, 1, Fraction(2), 0, True, "2SAT", "2XOR")


def direct_params() -> GadgetParams:
    return GadgetParams("direct", 1, Fraction(3, 2), Fraction(4), 0, True, "2SAT", "2XOR")


def _direct_template(first: Literal, second: Literal, weight: Fraction) -> list[LiteralConstraint]:
    half = weight / 2
    return [_unary(first, 1, half), _unary(second, 1, half), _pair(first, second, 1, half)]


def gadget_direct(clause: Clause, allocator: VariableAllocator | None = None) -> GadgetApplication:
    """Unit clause x as {1: x=1}; binary clause as the three half-weight constraints"""
    _require_width("direct", clause, clause.width <= 2, "1 or 2")
    if clause.width == 1:
        (literal,) = clause.literals
        return _application(clause.variables, (), [_unary(literal, 1, 1)], unit_params())
    first, second = clause.literals
    return _application(clause.variables, (), _direct_template(first, second, Fraction(1)), direct_params())


def translate_max2sat(clauses: Iterable[tuple[Fraction, Sequence[Literal]]]) -> list[LiteralConstraint]:
    """Apply the direct gadget, scaled by the clause weight, to weighted 1- and 2-clauses"""
    constraints = []
    for weight, literals in clauses:
        if len(literals) == 1:
            constraints.append(_unary(literals[0], 1, weight))
        elif len(literals) == 2:
            constraints.extend(_direct_template(literals[0], literals[1], Fraction(weight)))
        else:
            raise ValueError("Only clauses of width 1 or 2 can be translated directly")
    return constraints


def gadget_naive_xor(clause: Clause) -> list[ParityTerm]:
    """
    One parity term of weight 1/2^(k-1) per nonempty subset of the literals.

    The satisfied weight is 1 on satisfying assignments and 0 otherwise.
    """
    limit = settings.naive_xor_width_limit
    _require_width("naive-xor", clause, clause.width <= limit, f"at most {limit}")
    weight = Fraction(1, 2 ** (clause.width - 1))
    terms = []
    for size in range(1, clause.width + 1):
        for subset in combinations(clause.literals, size):
            flips = sum(1 for literal in subset if literal.negated)
            terms.append(ParityTerm(tuple(literal.var for literal in subset), 1 ^ (flips % 2), weight))
    return terms


def naive_xor_value(terms: Iterable[ParityTerm], values: Mapping[int, int]) -> Fraction:
    return sum((term.weight for term in terms if term.is_satisfied(values)), Fraction(0))


# -- kSAT to 3SAT chain ------------------------------------------------------

@dataclass(frozen=True)
class ClauseChain:
    """Result of splitting a long clause into a chain of width-3 clauses"""

    clauses: tuple[Clause, ...]
    clause_vars: tuple[int, ...]
    aux_vars: tuple[int, ...]
    params: GadgetParams


def gadget_ksat_to_3sat(clause: Clause, allocator: VariableAllocator | None = None) -> ClauseChain:
    """x1∨x2∨b1, ¬b1∨x3∨b2, ..., ¬b_(k-3)∨x_(k-1)∨x_k"""
    k = clause.width
    _require_width("ksat-to-3sat", clause, k >= 4, "at least 4")
    allocator = _fresh_allocator(clause, allocator)
    literals = clause.literals
    aux = [allocator.allocate() for _ in range(k - 3)]

    clauses = [Clause((literals[0], literals[1], _positive(aux[0])))]
    for index in range(1, k - 3):
        clauses.append(Clause((_negate(_positive(aux[index - 1])), literals[index + 1], _positive(aux[index]))))
    clauses.append(Clause((_negate(_positive(aux[-1])), literals[-2], literals[-1])))

    params = GadgetParams("ksat-to-3sat", k - 2, k - 2, None, k - 3, True, "kSAT", "3SAT")
    return ClauseChain(tuple(clauses), clause.variables, tuple(aux), params)


# -- reference gadgets for width 3 -------------------------------------------

REFERENCE_KINDS = ("trevisan", "nusslein", "chancellor", "bian_tseitin")

CAPTIONS: dict[str, PaperClaim] = {
    "trevisan": PaperClaim(Fraction(2), Fraction(3), Fraction(4)),
    "nusslein": PaperClaim(Fraction(5, 2), Fraction(9, 2), Fraction(2)),
    "chancellor": PaperClaim(Fraction(3), Fraction(5), Fraction(4)),
    "bian_tseitin": PaperClaim(Fraction(4), Fraction(6), Fraction(4, 3)),
}


def trevisan_max2sat_params() -> GadgetParams:
    """The 3SAT to Max2SAT stage, before the direct translation"""
    return GadgetParams("trevisan-max2sat", Fraction(7, 2), 4, None, 1, True, "3SAT", "2SAT")


def tseitin_params() -> GadgetParams:
    """x1∨x2∨x3 as {b ↔ x1∨x2, b∨x3}"""
    return GadgetParams("tseitin", 2, 2, None, 1, True, "3SAT", "OR-EQ|2SAT")


def bian_equivalence_params() -> GadgetParams:
    return GadgetParams("bian-equivalence", 3, Fraction(9, 2), Fraction(2), 0, False, "OR-EQ", "2XOR")


def _trevisan_clauses(l1: Literal, l2: Literal, l3: Literal, b: Literal) -> list[tuple[Fraction, list[Literal]]]:
    return [
        (HALF, [l1, l3]),
        (HALF, [_negate(l1), _negate(l3)]),
        (HALF, [l1, _negate(b)]),
        (HALF, [_negate(l1), b]),
        (HALF, [l3, _negate(b)]),
        (HALF, [_negate(l3), b]),
        (Fraction(1), [l2, b]),
    ]


def _equivalence_template(first: Literal, second: Literal, output: Literal) -> list[LiteralConstraint]:
    return [
        _unary(first, 0, HALF),
        _unary(second, 0, HALF),
        _unary(output, 1, 1),
        _pair(first, second, 1, HALF),
        _pair(first, output, 0, 1),
        _pair(second, output, 0, 1),
    ]


def _reference_template(kind: str, l1: Literal, l2: Literal, l3: Literal, b: Literal) -> list[LiteralConstraint]:
    if kind == "trevisan":
        return translate_max2sat(_trevisan_clauses(l1, l2, l3, b))
    if kind == "nusslein":
        return [
            _pair(l1, l2, 1, 1),
            _pair(l1, b, 0, 1),
            _pair(l2, b, 0, 1),
            _pair(l3, b, 1, HALF),
            _unary(l3, 1, HALF),
            _unary(b, 1, HALF),
        ]
    if kind == "chancellor":
        pairs = [_pair(first, second, 1, HALF) for first, second in combinations((l1, l2, l3), 2)]
        to_aux = [_pair(literal, b, 1, HALF) for literal in (l1, l2, l3)]
        unary = [_unary(literal, 1, HALF) for literal in (l1, l2, l3, b)]
        return pairs + to_aux + unary
    # bian_tseitin: b ↔ l1∨l2 through the equivalence gadget, then b∨l3 directly
    return _equivalence_template(l1, l2, b) + _direct_template(b, l3, Fraction(1))


@lru_cache(maxsize=None)
def reference_params(kind: str) -> GadgetParams:
    """
    Certified parameters of a width-3 reference gadget.

    Negated literals only flip right-hand sides, so the parameters measured
    on x1∨x2∨x3 hold for every sign pattern. The published values are kept
    in `paper_claimed` when they disagree with certification.
    """
    if kind not in REFERENCE_KINDS:
        raise UnknownGadgetError(kind)
    claim = CAPTIONS[kind]
    clause = Clause.of(1, 2, 3)
    template = _reference_template(kind, *clause.literals, _positive(4))
    params = GadgetParams(kind.replace("_", "-"), claim.alpha, claim.beta, claim.delta_e, 1, True, "3SAT", "2XOR")
    certificate = certify_gadget(_application(clause.variables, (4,), template, params), clause)
    params = replace(
        params,
        alpha=certificate.alpha,
        beta=certificate.beta,
        delta_e=certificate.delta_e,
        strict=certificate.strict,
    )
    if (claim.alpha, claim.beta, claim.delta_e) != (certificate.alpha, certificate.beta, certificate.delta_e):
        logger.warning(
            f"Gadget '{params.name}': published ({claim.alpha},{claim.beta}, ΔE={claim.delta_e}) "
            f"differs from certified ({certificate.alpha},{certificate.beta}, ΔE={certificate.delta_e})"
        )
        params = replace(params, paper_claimed=claim)
    return params


def gadget_reference(clause: Clause, kind: str, allocator: VariableAllocator | None = None) -> GadgetApplication:
    """Width-3 gadgets reproduced from the literature"""
    kind = kind.replace("-", "_")
    params = reference_params(kind)
    _require_width(params.name, clause, clause.width == 3, "3")
    allocator = _fresh_allocator(clause, allocator)
    aux = allocator.allocate()
    template = _reference_template(kind, *clause.literals, _positive(aux))
    return _application(clause.variables, (aux,), template, params)


def gadget_bian_equivalence(first: int, second: int, output: int) -> tuple[GadgetApplication, OrEquivalence]:
    """The non-strict gadget for output ↔ first∨second, without auxiliary variables"""
    source = OrEquivalence(first, second, output)
    template = _equivalence_template(_positive(first), _positive(second), _positive(output))
    return _application(source.variables, (), template, bian_equivalence_params()), source


# -- tree-like gadgets -------------------------------------------------------

TreeNode = Union[int, tuple["TreeNode", "TreeNode"]]


def _leaves(node: TreeNode) -> list[int]:
    if isinstance(node, int):
        return [node]
    return _leaves(node[0]) + _leaves(node[1])


def _node_text(node: TreeNode) -> str:
    if isinstance(node, int):
        return str(node)
    return f"({_node_text(node[0])} {_node_text(node[1])})"


@dataclass(frozen=True)
class TreeShape:
    """Binary tree whose leaves are the clause positions 1..k from left to right"""

    root: TreeNode

    def __post_init__(self):
        self._validate(self.root)
        leaves = _leaves(self.root)
        if leaves != list(range(1, len(leaves) + 1)):
            raise ValueError(f"Leaves must be 1..{len(leaves)} in order, got {leaves}")
        if len(leaves) < 2:
            raise ValueError("A tree shape needs at least two leaves")

    @staticmethod
    def _validate(node: TreeNode):
        if isinstance(node, int):
            return
        if not isinstance(node, tuple) or len(node) != 2:
            raise ValueError(f"Internal nodes must have exactly two children, got {node!r}")
        TreeShape._validate(node[0])
        TreeShape._validate(node[1])

    @property
    def width(self) -> int:
        return len(_leaves(self.root))

    @classmethod
    def comb(cls, k: int) -> "TreeShape":
        """Left comb (((1 2) 3) ... k)"""
        node: TreeNode = 1
        for leaf in range(2, k + 1):
            node = (node, leaf)
        return cls(node)

    @classmethod
    def balanced(cls, k: int) -> "TreeShape":
        """Left subtree takes the larger half of the leaves"""
        def build(low: int, high: int) -> TreeNode:
            if low == high:
                return low
            middle = low + (high - low + 2) // 2 - 1
            return (build(low, middle), build(middle + 1, high))
        return cls(build(1, k))

    @classmethod
    def random(cls, k: int, rng: np.random.Generator) -> "TreeShape":
        def build(low: int, high: int) -> TreeNode:
            if low == high:
                return low
            middle = int(rng.integers(low, high))
            return (build(low, middle), build(middle + 1, high))
        return cls(build(1, k))

    @classmethod
    def parse(cls, text: str) -> "TreeShape":
        """Nested-parenthesis form such as '((1 2)(3 4))'"""
        tokens = re.findall(r"\(|\)|\d+|\S", text)
        position = 0

        def node() -> TreeNode:
            nonlocal position
            if position >= len(tokens):
                raise ValueError(f"Unexpected end of tree shape '{text}'")
            token = tokens[position]
            position += 1
            if token.isdigit():
                return int(token)
            if token != "(":
                raise ValueError(f"Unexpected '{token}' in tree shape '{text}'")
            left = node()
            right = node()
            if position >= len(tokens) or tokens[position] != ")":
                raise ValueError(f"Expected ')' in tree shape '{text}'")
            position += 1
            return (left, right)

        root = node()
        if position != len(tokens):
            raise ValueError(f"Trailing input in tree shape '{text}'")
        return cls(root)

    def to_text(self) -> str:
        return _node_text(self.root)


def tree_constraints(
    shape: TreeShape,
    leaves: Sequence[Literal],
    output: Literal | None,
    allocator: VariableAllocator,
) -> tuple[list[LiteralConstraint], list[int]]:
    """
    Half-weight triangles {c1⊕c2=1, c1⊕out=0, c2⊕out=0} for every internal node.

    `output` None stands for the constant true node at the root, which turns
    c⊕1=0 into c=1. Returns the constraints and the auxiliary variables.
    """
    if len(leaves) != shape.width:
        raise UnsupportedWidthError(f"tree:{shape.to_text()}", len(leaves), str(shape.width))
    constraints: list[LiteralConstraint] = []
    aux: list[int] = []

    def term(child: TreeNode) -> Literal:
        if isinstance(child, int):
            return leaves[child - 1]
        var = allocator.allocate()
        aux.append(var)
        literal = _positive(var)
        visit(child, literal)
        return literal

    def visit(node: TreeNode, out: Literal | None):
        first = term(node[0])
        second = term(node[1])
        constraints.append(_pair(first, second, 1, HALF))
        for literal in (first, second):
            if out is None:
                constraints.append(_unary(literal, 1, HALF))
            else:
                constraints.append(_pair(literal, out, 0, HALF))

    visit(shape.root, output)
    return constraints, aux


def tree_params(k: int, name: str = "tree") -> GadgetParams:
    return GadgetParams(name, k - 1, Fraction(3 * (k - 1), 2), Fraction(4), k - 2, True, "kSAT", "2XOR")


def gadget_tree(
    clause: Clause,
    shape: TreeShape | None = None,
    allocator: VariableAllocator | None = None,
    name: str = "tree",
) -> GadgetApplication:
    """Tree-like gadget; the default shape is the left comb"""
    k = clause.width
    _require_width(name, clause, k >= 2, "at least 2")
    shape = shape or TreeShape.comb(k)
    if shape.width != k:
        raise UnsupportedWidthError(f"tree:{shape.to_text()}", k, str(shape.width))
    allocator = _fresh_allocator(clause, allocator)
    constraints, aux = tree_constraints(shape, clause.literals, None, allocator)
    return _application(clause.variables, aux, constraints, tree_params(k, name))


# -- clique-like gadgets -----------------------------------------------------

def clique_supported(k: int) -> bool:
    return k == 5 or (k >= 4 and k & (k - 1) == 0)


def clique_params(k: int) -> GadgetParams:
    if k == 5:
        return GadgetParams("clique", 10, Fraction(52, 3), Fraction(12, 5), 2, True, "kSAT", "2XOR")
    return GadgetParams(
        "clique",
        Fraction(k * (k - 1), 2),
        Fraction(11 * k * k - 15 * k + 4, 12),
        Fraction(32, k * k),
        int(math.log2(k)) - 1,
        True,
        "kSAT",
        "2XOR",
    )


def gadget_clique(clause: Clause, allocator: VariableAllocator | None = None) -> GadgetApplication:
    """Clique-like gadget with log2(k)-1 auxiliary variables (k a power of 2, or k=5)"""
    k = clause.width
    _require_width("clique", clause, clique_supported(k), "a power of 2 (at least 4) or 5")
    allocator = _fresh_allocator(clause, allocator)
    params = clique_params(k)
    aux = [allocator.allocate() for _ in range(params.num_aux)]
    b = [_positive(var) for var in aux]
    literals = clause.literals

    constraints = [_unary(literal, 1, HALF) for literal in literals]
    constraints += [_pair(first, second, 1, HALF) for first, second in combinations(literals, 2)]
    if k == 5:
        constraints += [_unary(b[0], 1, Fraction(2, 3)), _unary(b[1], 1, Fraction(5, 6))]
        constraints += [_pair(literal, b[0], 1, Fraction(5, 6)) for literal in literals]
        constraints += [_pair(literal, b[1], 1, Fraction(2, 3)) for literal in literals]
        constraints.append(_pair(b[0], b[1], 1, Fraction(5, 6)))
    else:
        for j, aux_literal in enumerate(b, start=1):
            constraints.append(_unary(aux_literal, 1, 2 ** (j - 1)))
            constraints += [_pair(literal, aux_literal, 1, 2 ** (j - 1)) for literal in literals]
        for (i, first), (j, second) in combinations(list(enumerate(b, start=1)), 2):
            constraints.append(_pair(first, second, 1, 2 ** (i + j - 1)))
    return _application(clause.variables, aux, constraints, params)


# -- chains with an inner width-3 gadget ---------------------------------------

def compose_params(first: GadgetParams, second: GadgetParams) -> GadgetParams:
    """alpha = beta1(alpha2-1) + alpha1, beta = beta1 beta2"""
    if second.source not in first.target.split("|"):
        raise FamilyMismatchError(first.target, second.source)
    return GadgetParams(
        name=f"{first.name}+{second.name}",
        alpha=first.beta * (second.alpha - 1) + first.alpha,
        beta=first.beta * second.beta,
        delta_e=None,
        num_aux=None,
        strict=first.strict and second.strict,
        source=first.source,
        target=second.target,
    )


def compose_params_weighted(first: GadgetParams, parts: Sequence[tuple[Fraction, GadgetParams]]) -> GadgetParams:
    """
    Composition when the first gadget's output constraints use different gadgets.

    `parts` pairs the total weight of each output family with its gadget;
    the weights must add up to beta1.
    """
    families = first.target.split("|")
    for _, second in parts:
        if second.source not in families:
            raise FamilyMismatchError(first.target, second.source)
    total = sum((Fraction(weight) for weight, _ in parts), Fraction(0))
    if total != first.beta:
        raise ValueError(f"Part weights add up to {total}, expected beta={first.beta}")
    targets = sorted({second.target for _, second in parts})
    return GadgetParams(
        name=first.name + "+" + "/".join(second.name for _, second in parts),
        alpha=first.alpha + sum((Fraction(weight) * (second.alpha - 1) for weight, second in parts), Fraction(0)),
        beta=sum((Fraction(weight) * second.beta for weight, second in parts), Fraction(0)),
        delta_e=None,
        num_aux=None,
        strict=first.strict and all(second.strict for _, second in parts),
        source=first.source,
        target="|".join(targets),
    )


def gadget_chain(clause: Clause, inner: str, allocator: VariableAllocator | None = None) -> GadgetApplication:
    """Split a long clause into width-3 links and apply a reference gadget to each"""
    allocator = _fresh_allocator(clause, allocator)
    chain = gadget_ksat_to_3sat(clause, allocator)
    links = [gadget_reference(link, inner, allocator) for link in chain.clauses]
    aux = list(chain.aux_vars) + [var for link in links for var in link.aux_vars]
    constraints = [constraint for link in links for constraint in link.constraints.constraints]

    num_vars = max([*clause.variables, *aux])
    fragment = simplify(Max2XorProblem(num_vars, tuple(constraints)))

    # link offsets are left out of the fragment, and link params are measured without them;
    # fragment.offset only holds pairs that cancel across links
    link = links[0]
    composed = compose_params(chain.params, link.params)
    try:
        delta_e = energy_gap(fragment)
    except GapUndefinedError:
        delta_e = None
    params = replace(
        composed,
        name=f"chain-{link.params.name}",
        alpha=composed.alpha - fragment.offset,
        beta=composed.beta - 2 * fragment.offset,
        num_aux=len(aux),
        delta_e=delta_e,
    )
    return GadgetApplication(fragment, clause.variables, tuple(aux), params)
