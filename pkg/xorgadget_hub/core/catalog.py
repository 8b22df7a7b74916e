"""
Gadget catalog and formula compilation.
This module registers every clause gadget under its strategy name, parses
per-width strategies and compiles whole CNF formulas into Max2XOR problems.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from xorgadget_hub.core.certify import certify_gadget
from xorgadget_hub.core.exceptions import StrategyError, UnknownGadgetError, UnsupportedWidthError
from xorgadget_hub.core.formula import Clause, CnfFormula
from xorgadget_hub.core.gadgets import (
    REFERENCE_KINDS,
    GadgetApplication,
    GadgetParams,
    TreeShape,
    VariableAllocator,
    clique_supported,
    gadget_bian_equivalence,
    gadget_chain,
    gadget_clique,
    gadget_direct,
    gadget_reference,
    gadget_tree,
)
from xorgadget_hub.core.max2xor import Max2XorProblem, simplify, union
from xorgadget_hub.infra.settings import settings
from xorgadget_hub.logging_config import logger

Builder = Callable[[Clause, VariableAllocator], GadgetApplication]


@dataclass(frozen=True)
class GadgetKind:
    """A named clause gadget and the clause widths it accepts"""

    name: str
    build: Builder
    supports: Callable[[int], bool]
    widths: str

    def apply(self, clause: Clause, allocator: VariableAllocator) -> GadgetApplication:
        if not self.supports(clause.width):
            raise UnsupportedWidthError(self.name, clause.width, self.widths)
        return self.build(clause, allocator)


def _reference_kind(kind: str) -> GadgetKind:
    name = kind.replace("_", "-")
    return GadgetKind(name, lambda clause, allocator: gadget_reference(clause, kind, allocator), lambda k: k == 3, "3")


def _chain_kind(inner: str) -> GadgetKind:
    name = "chain-" + inner.replace("_", "-")
    return GadgetKind(name, lambda clause, allocator: gadget_chain(clause, inner, allocator), lambda k: k >= 4, "at least 4")


def _tree_kind(name: str, shape_for: Callable[[int], TreeShape | None], supports=lambda k: k >= 2, widths="at least 2"):
    return GadgetKind(
        name,
        lambda clause, allocator: gadget_tree(clause, shape_for(clause.width), allocator, name=name),
        supports,
        widths,
    )


GADGET_REGISTRY: dict[str, GadgetKind] = {
    "unit": GadgetKind("unit", gadget_direct, lambda k: k == 1, "1"),
    "direct": GadgetKind("direct", gadget_direct, lambda k: k <= 2, "1 or 2"),
    "tree": _tree_kind("tree", lambda k: None),
    "tree-balanced": _tree_kind("tree-balanced", TreeShape.balanced),
    "clique": GadgetKind("clique", gadget_clique, clique_supported, "a power of 2 (at least 4) or 5"),
    **{kind.replace("_", "-"): _reference_kind(kind) for kind in REFERENCE_KINDS},
    **{f"chain-{kind.replace('_', '-')}": _chain_kind(kind) for kind in REFERENCE_KINDS},
}


def get_gadget(name: str) -> GadgetKind:
    """Look up a gadget by strategy name; 'tree:<shape>' builds a fixed-shape tree"""
    if name in GADGET_REGISTRY:
        return GADGET_REGISTRY[name]
    if name.startswith("tree:"):
        try:
            shape = TreeShape.parse(name[len("tree:"):])
        except ValueError as e:
            raise StrategyError(str(e)) from e
        return _tree_kind(name, lambda k: shape, lambda k: k == shape.width, str(shape.width))
    raise UnknownGadgetError(name)


def is_known_gadget(name: str) -> bool:
    try:
        get_gadget(name)
    except (UnknownGadgetError, StrategyError):
        return False
    return True


_RULE = re.compile(r"^(\d+)(\+?)$")


@dataclass(frozen=True)
class Strategy:
    """
    Gadget choice per clause width, e.g. '1:unit,2:direct,3:tree,4+:tree-balanced'.

    An exact width rule wins; otherwise the 'n+' rule with the largest n not
    above the width applies.
    """

    exact: dict[int, str] = field(default_factory=dict)
    open_ended: dict[int, str] = field(default_factory=dict)

    def resolve(self, width: int) -> str:
        if width in self.exact:
            return self.exact[width]
        lows = [low for low in self.open_ended if low <= width]
        if not lows:
            raise StrategyError(f"no gadget configured for clause width {width}")
        return self.open_ended[max(lows)]

    def to_text(self) -> str:
        rules = [(width, "", name) for width, name in self.exact.items()]
        rules += [(width, "+", name) for width, name in self.open_ended.items()]
        return ",".join(f"{width}{plus}:{name}" for width, plus, name in sorted(rules))


def parse_strategy(text: str) -> Strategy:
    exact: dict[int, str] = {}
    open_ended: dict[int, str] = {}
    for rule in filter(None, (part.strip() for part in text.split(","))):
        width_text, sep, name = rule.partition(":")
        match = _RULE.match(width_text.strip())
        if not sep or not match or not name.strip():
            raise StrategyError(f"malformed rule '{rule}', expected 'WIDTH:GADGET' or 'WIDTH+:GADGET'")
        width = int(match.group(1))
        if width < 1:
            raise StrategyError(f"clause width must be positive in rule '{rule}'")
        name = name.strip()
        if not is_known_gadget(name):
            raise StrategyError(f"unknown gadget '{name}' in rule '{rule}'")
        target = open_ended if match.group(2) else exact
        if width in target:
            raise StrategyError(f"width {width} is configured twice")
        target[width] = name
    if not exact and not open_ended:
        raise StrategyError("empty strategy")
    return Strategy(exact, open_ended)


def strategy_for_gadget(name: str) -> Strategy:
    """Shortcut used by '--gadget KIND': unit and direct below width 3, KIND above"""
    if name in ("unit", "direct"):
        return parse_strategy("1:unit,2:direct")
    return parse_strategy(f"1:unit,2:direct,3+:{name}")


def default_strategy() -> Strategy:
    return parse_strategy(settings.default_strategy)


@dataclass(frozen=True)
class CompileResult:
    """
    Compiled problem with the per-clause gadgets and aggregate parameters.

    A formula is unsatisfiable exactly when Cost of the compiled problem
    reaches `unsat_threshold`; when it is satisfiable its Opt equals
    `expected_opt_if_satisfiable`.
    """

    problem: Max2XorProblem
    applications: tuple[GadgetApplication, ...]
    strategy: Strategy
    num_clauses: int

    @property
    def sum_alpha_minus_one(self) -> Fraction:
        return sum((app.params.alpha - 1 for app in self.applications), Fraction(0))

    @property
    def sum_beta_minus_alpha(self) -> Fraction:
        return sum((app.params.beta - app.params.alpha for app in self.applications), Fraction(0))

    @property
    def num_aux(self) -> int:
        return sum(len(app.aux_vars) for app in self.applications)

    @property
    def unsat_threshold(self) -> Fraction:
        return self.sum_beta_minus_alpha + 1

    @property
    def expected_opt_if_satisfiable(self) -> Fraction:
        return self.sum_alpha_minus_one + self.num_clauses

    @property
    def all_strict(self) -> bool:
        return all(app.params.strict for app in self.applications)

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy.to_text(),
            "clauses": [
                {
                    "clause_vars": list(app.clause_vars),
                    "aux_vars": list(app.aux_vars),
                    "params": app.params.to_json(),
                }
                for app in self.applications
            ],
            "totals": {
                "num_clauses": self.num_clauses,
                "sum_alpha_minus_one": str(self.sum_alpha_minus_one),
                "sum_beta_minus_alpha": str(self.sum_beta_minus_alpha),
                "num_aux": self.num_aux,
                "num_vars": self.problem.num_vars,
                "num_constraints": len(self.problem.constraints),
                "unsat_threshold": str(self.unsat_threshold),
                "expected_opt_if_satisfiable": str(self.expected_opt_if_satisfiable),
                "all_strict": self.all_strict,
            },
        }


def compile_cnf(formula: CnfFormula, strategy: Strategy | str | None = None) -> CompileResult:
    """
    Replace every clause by its gadget and return the simplified union.

    Auxiliary variables are numbered after the formula's variables in clause
    order.
    """
    if strategy is None:
        strategy = default_strategy()
    elif isinstance(strategy, str):
        strategy = parse_strategy(strategy)

    allocator = VariableAllocator(formula.num_vars + 1)
    applications = []
    for clause in formula.clauses:
        gadget = get_gadget(strategy.resolve(clause.width))
        applications.append(gadget.apply(clause, allocator))

    num_vars = max(formula.num_vars, allocator.last)
    problem = simplify(union(num_vars, (app.constraints.constraints for app in applications)))
    logger.info(
        f"Compiled {len(formula.clauses)} clauses into {len(problem.constraints)} constraints "
        f"over {num_vars} variables ({allocator.count} auxiliary)"
    )
    return CompileResult(problem, tuple(applications), strategy, len(formula.clauses))


# -- catalog dump --------------------------------------------------------------

CATALOG_WIDTHS: dict[str, tuple[int, ...]] = {
    "unit": (1,),
    "direct": (2,),
    "trevisan": (3,),
    "nusslein": (3,),
    "chancellor": (3,),
    "bian-tseitin": (3,),
    "tree": (3, 4, 5, 6),
    "tree-balanced": (4, 5, 6, 7),
    "clique": (4, 5, 8),
    "chain-trevisan": (4, 5),
}


def _entry(app: GadgetApplication, width: int, source) -> dict:
    certificate = certify_gadget(app, source)
    params: GadgetParams = app.params
    return {
        "name": params.name,
        "width": width,
        "constraints": app.constraints.to_json(),
        "params": params.to_json(),
        "certified": {
            "alpha": str(certificate.alpha),
            "beta": str(certificate.beta),
            "strict": certificate.strict,
            "delta_e": None if certificate.delta_e is None else str(certificate.delta_e),
            "summary": certificate.summary(),
        },
        "paper_claimed": None if params.paper_claimed is None else params.paper_claimed.to_json(),
    }


def dump_catalog(names: list[str] | None = None) -> list[dict]:
    """Catalog entries on the all-positive clause x1∨...∨xk, certified"""
    entries = []
    for name, widths in CATALOG_WIDTHS.items():
        if names is not None and name not in names:
            continue
        gadget = get_gadget(name)
        for width in widths:
            clause = Clause.of(*range(1, width + 1))
            app = gadget.apply(clause, VariableAllocator(width + 1))
            entries.append(_entry(app, width, clause))
    if names is None or "bian-equivalence" in names:
        app, source = gadget_bian_equivalence(1, 2, 3)
        entries.append(_entry(app, 2, source))
    return entries
