"""
Pipeline layer for the gadget compiler.
This module contains use cases that tie parsing, compilation, conversion,
verification and search together for the command line.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from xorgadget_hub.core.catalog import (
    CompileResult,
    Strategy,
    compile_cnf,
    default_strategy,
    dump_catalog,
    get_gadget,
    parse_strategy,
    strategy_for_gadget,
)
from xorgadget_hub.core.certify import GadgetCertificate, certify_gadget
from xorgadget_hub.core.convert import (
    IsingModel,
    QuboModel,
    energy_gap,
    ising_to_max2xor,
    landau_zener_success,
    max2xor_to_ising,
    max2xor_to_qubo,
    normalize_to_ranges,
    qubo_to_ising,
)
from xorgadget_hub.core.embedding import ChainReport, chain_rewrite
from xorgadget_hub.core.exceptions import GapUndefinedError, ModelFormatError, VerificationError
from xorgadget_hub.core.formula import Clause
from xorgadget_hub.core.gadgets import GadgetApplication, GadgetParams, TreeShape, VariableAllocator, gadget_bian_equivalence
from xorgadget_hub.core.max2xor import Assignment, Max2XorProblem, exhaustive_opt
from xorgadget_hub.core.verify import (
    AnnealSchedule,
    RelationReport,
    TreeLemmaReport,
    anneal_solve,
    check_opt_cost_relation,
    check_tree_lemma,
)
from xorgadget_hub.decorators import log_action
from xorgadget_hub.infra.settings import settings
from xorgadget_hub.infra.storage import StorageManager
from xorgadget_hub.logging_config import logger
from xorgadget_hub.search_service.model import SearchProblem, SearchResult
from xorgadget_hub.search_service.searcher import GadgetSearcher, Optimality

OUTPUT_FORMATS = ("m2x", "qubo", "ising")
SOLVE_METHODS = ("exact", "anneal")


def _gap_or_none(model) -> Fraction | None:
    try:
        return energy_gap(model)
    except GapUndefinedError:
        return None


def _text(value: Fraction | None) -> str | None:
    return None if value is None else str(value)


@dataclass
class CompileOutcome:
    model: Max2XorProblem | QuboModel | IsingModel
    problem: Max2XorProblem
    report: dict[str, Any]
    compiled: CompileResult | None = None
    chains: ChainReport | None = None


class CompileUseCase:
    """Compilation of CNF or Max2XOR inputs into the requested output model"""

    def __init__(self, storage: StorageManager | None = None):
        self.storage = storage or StorageManager()

    def _load_problem(self, path: str, strategy: Strategy) -> tuple[Max2XorProblem, CompileResult | None]:
        if self.storage.is_cnf(path):
            dimacs = self.storage.load_cnf(path)
            for warning in dimacs.warnings:
                logger.warning(f"{path}: {warning}")
            compiled = compile_cnf(dimacs.formula, strategy)
            return compiled.problem, compiled
        model = self.storage.load_model(path)
        if not isinstance(model, Max2XorProblem):
            raise ModelFormatError("m2x", f"{path}: compile expects a CNF or Max2XOR input")
        return model, None

    @log_action("compile")
    def compile(
        self,
        path: str,
        strategy: Strategy | None = None,
        output_format: str = "m2x",
        graph_path: str | None = None,
        placement_path: str | None = None,
        normalize: bool = False,
        h_range: tuple = (-1, 1),
        j_range: tuple = (-1, 1),
    ) -> CompileOutcome:
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format '{output_format}'")
        strategy = strategy or default_strategy()
        problem, compiled = self._load_problem(path, strategy)

        chains = None
        if graph_path is not None:
            graph = self.storage.load_graph(graph_path)
            if placement_path is not None:
                placement = self.storage.load_placement(placement_path)
            else:
                placement = {var: var for var in sorted(problem.variables)}
            problem, chains = chain_rewrite(problem, placement, graph)

        gap = _gap_or_none(problem)
        scale = Fraction(1)
        if normalize and problem.constraints:
            _, scale = normalize_to_ranges(max2xor_to_ising(problem), h_range, j_range)
        scaled = problem.scale(scale) if scale != 1 else problem

        if output_format == "qubo":
            model = max2xor_to_qubo(scaled)
        elif output_format == "ising":
            model = max2xor_to_ising(scaled)
        else:
            model = scaled

        report: dict[str, Any] = {
            "input": str(path),
            "format": output_format,
            "num_vars": problem.num_vars,
            "num_constraints": len(problem.constraints),
            "num_qubits": len(problem.variables),
            "energy_gap": _text(gap),
            "scale": str(scale),
            "normalized_energy_gap": _text(None if gap is None else gap / scale),
        }
        if compiled is not None:
            report.update(compiled.to_json())
        if chains is not None:
            report["embedding"] = chains.to_json()
        return CompileOutcome(model, problem, report, compiled, chains)


@dataclass
class VerifyOutcome:
    certificate: GadgetCertificate
    params: GadgetParams | None
    discrepancies: list[str] = field(default_factory=list)
    paper_discrepancy: bool = False


class VerifyUseCase:
    """Certification of catalog gadgets and gadget files"""

    def __init__(self, storage: StorageManager | None = None):
        self.storage = storage or StorageManager()

    def build(self, name: str, width: int) -> tuple[GadgetApplication, object]:
        """Gadget application on x1∨...∨xk and the constraint it replaces"""
        if name == "bian-equivalence":
            return gadget_bian_equivalence(1, 2, 3)
        clause = Clause.of(*range(1, width + 1))
        return get_gadget(name).apply(clause, VariableAllocator(width + 1)), clause

    @log_action("verify_gadget")
    def verify_gadget(self, name: str, width: int) -> VerifyOutcome:
        app, source = self.build(name, width)
        certificate = certify_gadget(app, source)
        params = app.params
        declared = {
            "alpha": (params.alpha, certificate.alpha),
            "beta": (params.beta, certificate.beta),
            "strict": (params.strict, certificate.strict),
            "delta_e": (params.delta_e, certificate.delta_e),
        }
        discrepancies = [
            f"{key}: declared {expected}, certified {actual}"
            for key, (expected, actual) in declared.items()
            if expected != actual
        ]
        if discrepancies:
            raise VerificationError(f"{params.name} parameters", "; ".join(discrepancies))

        claimed = params.paper_claimed
        notes = []
        if claimed is not None:
            notes = [
                f"{key}: published {published}, certified {actual}"
                for key, published, actual in (
                    ("alpha", claimed.alpha, certificate.alpha),
                    ("beta", claimed.beta, certificate.beta),
                    ("delta_e", claimed.delta_e, certificate.delta_e),
                )
                if published != actual
            ]
            for note in notes:
                logger.warning(f"{params.name}: {note}")
        return VerifyOutcome(certificate, params, notes, bool(notes))

    @log_action("verify_file")
    def verify_file(self, path: str, width: int) -> VerifyOutcome:
        """Certify a Max2XOR file as a gadget of x1∨...∨xk; variables above k are auxiliary"""
        problem = self.storage.load_model(path)
        if not isinstance(problem, Max2XorProblem):
            raise ModelFormatError("m2x", f"{path}: verify expects a Max2XOR file")
        if width > problem.num_vars:
            raise ValueError(f"Clause width {width} exceeds the {problem.num_vars} variables of {path}")
        clause = Clause.of(*range(1, width + 1))
        aux = tuple(range(width + 1, problem.num_vars + 1))
        placeholder = GadgetParams(str(path), 1, 1)
        app = GadgetApplication(problem, clause.variables, aux, placeholder)
        return VerifyOutcome(certify_gadget(app, clause), None)


@dataclass
class SolveOutcome:
    value: Fraction
    assignment: Assignment
    kind: str
    method: str
    success_probability: float | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "method": self.method,
            "value": str(self.value),
            "assignment": str(self.assignment),
            "success_probability": self.success_probability,
        }


class SolveUseCase:
    """Exact and annealing solvers over stored models"""

    def __init__(self, storage: StorageManager | None = None):
        self.storage = storage or StorageManager()

    @log_action("solve")
    def solve(self, path: str, method: str = "exact", seed: int | None = None, lz_c: float | None = None) -> SolveOutcome:
        """
        Minimum falsified weight of a Max2XOR problem, or minimum energy of
        an Ising or QUBO model.
        """
        if method not in SOLVE_METHODS:
            raise ValueError(f"Unknown solve method '{method}'")
        model = self.storage.load_model(path)
        if isinstance(model, Max2XorProblem):
            kind, problem, ising, shift = "m2x", model, None, Fraction(0)
        else:
            kind = "qubo" if isinstance(model, QuboModel) else "ising"
            ising = qubo_to_ising(model) if isinstance(model, QuboModel) else model
            problem, shift = ising_to_max2xor(ising)

        if method == "exact":
            result = exhaustive_opt(problem)
            value = result.cost + shift
            assignment = result.witnesses[0]
        else:
            annealed = anneal_solve(problem if ising is None else ising, AnnealSchedule.from_settings(), seed)
            value, assignment = annealed.value, annealed.assignment

        probability = None
        if lz_c is not None:
            gap = _gap_or_none(problem)
            if gap is not None:
                probability = landau_zener_success(float(gap), lz_c)
        return SolveOutcome(value, assignment, kind, method, probability)


class SearchUseCase:
    """Gadget search and optimality certification"""

    @log_action("search")
    def search(
        self,
        k: int,
        num_aux: int,
        strict: bool = True,
        heuristic: bool = False,
        seed: int | None = None,
    ) -> tuple[SearchResult, Optimality]:
        problem = SearchProblem(k, num_aux, strict)
        result = GadgetSearcher(seed=seed).search(problem, heuristic)
        optimality = Optimality.PROVEN if result.optimal else Optimality.UNKNOWN
        return result, optimality


class CatalogUseCase:
    """Catalog dump and the counting checks behind the catalog"""

    def __init__(self, storage: StorageManager | None = None):
        self.storage = storage or StorageManager()

    @log_action("catalog")
    def dump(self, names: list[str] | None = None) -> list[dict]:
        return dump_catalog(names)

    @log_action("tree_lemma")
    def tree_lemma(self, k: int, shape: str | None = None) -> TreeLemmaReport:
        tree = TreeShape.parse(shape) if shape else None
        return check_tree_lemma(k, tree)

    @log_action("relation")
    def relation(self, path: str, strategy: Strategy | None = None) -> RelationReport:
        dimacs = self.storage.load_cnf(path)
        return check_opt_cost_relation(dimacs.formula, strategy or default_strategy())


def resolve_strategy(gadget: str | None, strategy: str | None) -> Strategy:
    """Strategy from '--gadget KIND' or '--strategy SPEC', defaulting to the configured one"""
    if gadget and strategy:
        raise ValueError("Use either a gadget or a strategy, not both")
    if gadget:
        return strategy_for_gadget(gadget)
    if strategy:
        return parse_strategy(strategy)
    return parse_strategy(settings.default_strategy)
