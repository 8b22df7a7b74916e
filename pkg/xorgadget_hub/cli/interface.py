"""
Command line interface for the gadget compiler.
This module provides a CLI for compiling CNF formulas into Max2XOR, QUBO and
Ising models, certifying gadgets, solving models and searching for gadgets.
"""

import argparse
import os
import sys
from fractions import Fraction

from xorgadget_hub.core.catalog import CATALOG_WIDTHS
from xorgadget_hub.core.exceptions import (
    DimacsFormatError,
    EmbeddingError,
    EnumerationLimitError,
    FamilyMismatchError,
    GapUndefinedError,
    ModelFormatError,
    NotAGadgetError,
    SearchInfeasibleError,
    SearchLimitError,
    StrategyError,
    UnknownGadgetError,
    UnsupportedWidthError,
    VerificationError,
)
from xorgadget_hub.core.usecases import (
    OUTPUT_FORMATS,
    SOLVE_METHODS,
    CatalogUseCase,
    CompileUseCase,
    SearchUseCase,
    SolveUseCase,
    VerifyUseCase,
    resolve_strategy,
)
from xorgadget_hub.infra.settings import settings
from xorgadget_hub.infra.storage import StorageManager
from xorgadget_hub.search_service.model import SearchProblem
from xorgadget_hub.search_service.searcher import GadgetSearcher

DOMAIN_ERRORS = (
    DimacsFormatError,
    EmbeddingError,
    EnumerationLimitError,
    FamilyMismatchError,
    GapUndefinedError,
    ModelFormatError,
    NotAGadgetError,
    SearchInfeasibleError,
    SearchLimitError,
    StrategyError,
    UnknownGadgetError,
    UnsupportedWidthError,
    VerificationError,
    OSError,
    ValueError,
)


def _range(text: str) -> tuple[Fraction, Fraction]:
    """Parse 'lo,hi' into a pair of fractions"""
    try:
        low, high = (Fraction(part.strip()) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got '{text}'") from None
    return low, high


class CLIInterface:
    """Command line interface of the gadget compiler"""

    def __init__(self):
        self.storage = StorageManager()
        self.compile_usecase = CompileUseCase(self.storage)
        self.verify_usecase = VerifyUseCase(self.storage)
        self.solve_usecase = SolveUseCase(self.storage)
        self.search_usecase = SearchUseCase()
        self.catalog_usecase = CatalogUseCase(self.storage)

    def run(self, args=None) -> int:
        """Run one command and return the exit code"""
        parser = self._create_parser()
        try:
            parsed_args = parser.parse_args(args)
        except SystemExit as e:
            return 0 if e.code in (0, None) else 2
        if not parsed_args.command:
            parser.print_help()
            return 2
        return self._handle_command(parsed_args)

    def _create_parser(self):
        """Create parser for command line interface"""
        parser = argparse.ArgumentParser(
            prog="xorgadget",
            description="Compile SAT formulas into Max2XOR, QUBO and Ising models",
        )
        parser.add_argument("--seed", type=int, default=None,
                            help=f"Random seed (default {settings.default_seed})")
        subparsers = parser.add_subparsers(dest="command", help="Available commands")

        # Compile command
        compile_parser = subparsers.add_parser("compile", help="Compile a CNF or Max2XOR file")
        compile_parser.add_argument("path", help="DIMACS CNF or m2x JSON file")
        compile_parser.add_argument("--gadget", help="Gadget for clauses of width 3 and more")
        compile_parser.add_argument("--strategy", help="Gadget per width, e.g. '1:unit,2:direct,3+:tree'")
        compile_parser.add_argument("--format", choices=OUTPUT_FORMATS, default="m2x", help="Output model format")
        compile_parser.add_argument("--graph", help="Coupling graph file")
        compile_parser.add_argument("--placement", help="Variable to qubit placement file")
        compile_parser.add_argument("--normalize", action="store_true", help="Scale coefficients into the ranges")
        compile_parser.add_argument("--h-range", type=_range, default=(Fraction(-1), Fraction(1)),
                                    help="Linear coefficient range 'lo,hi' (default -1,1)")
        compile_parser.add_argument("--j-range", type=_range, default=(Fraction(-1), Fraction(1)),
                                    help="Quadratic coefficient range 'lo,hi' (default -1,1)")
        compile_parser.add_argument("--output", help="Model file (default: print to stdout)")
        compile_parser.add_argument("--report", help="JSON report file")
        compile_parser.add_argument("--json", action="store_true",
                                    help="Print the JSON report instead of the summary table")

        # Verify command
        verify_parser = subparsers.add_parser("verify", help="Certify a catalog gadget or an m2x gadget file")
        verify_parser.add_argument("gadget", help="Gadget name or m2x file")
        verify_parser.add_argument("width", type=int, help="Clause width")
        verify_parser.add_argument("--json", action="store_true", help="Print the full certificate as JSON")

        # Solve command
        solve_parser = subparsers.add_parser("solve", help="Solve an m2x, Ising or QUBO model")
        solve_parser.add_argument("path", help="Model file")
        solve_parser.add_argument("--method", choices=SOLVE_METHODS, default="exact", help="Solver")
        solve_parser.add_argument("--lz-c", type=float, help="Landau-Zener constant for the success estimate")

        # Search command
        search_parser = subparsers.add_parser("search", help="Search for a gadget with the largest energy gap")
        search_parser.add_argument("--k", type=int, required=True, help="Clause width")
        search_parser.add_argument("--aux", type=int, required=True, help="Number of auxiliary variables")
        search_parser.add_argument("--no-strict", action="store_true", help="Do not require strictness")
        search_parser.add_argument("--heuristic", action="store_true", help="Heuristic search only")
        search_parser.add_argument("--certify", help="Check that this energy gap is optimal instead")

        # Catalog command
        catalog_parser = subparsers.add_parser("catalog", help="Dump catalog gadgets with certified parameters")
        catalog_parser.add_argument("names", nargs="*", help="Gadget names (default: all)")
        catalog_parser.add_argument("--output", help="JSON file (default: print to stdout)")

        # Tree lemma command
        lemma_parser = subparsers.add_parser("tree-lemma", help="Check the tree counting lemma")
        lemma_parser.add_argument("k", type=int, help="Number of tree leaves")
        lemma_parser.add_argument("--shape", help="Tree shape, e.g. '((1 2)(3 4))'")

        # Relation command
        relation_parser = subparsers.add_parser("relation", help="Check Opt/Cost of a CNF against its compilation")
        relation_parser.add_argument("path", help="DIMACS CNF file")
        relation_parser.add_argument("--gadget", help="Gadget for clauses of width 3 and more")
        relation_parser.add_argument("--strategy", help="Gadget per width")

        return parser

    def _handle_command(self, args) -> int:
        """Dispatch parsed arguments to the command handler"""
        handlers = {
            "compile": self._handle_compile,
            "verify": self._handle_verify,
            "solve": self._handle_solve,
            "search": self._handle_search,
            "catalog": self._handle_catalog,
            "tree-lemma": self._handle_tree_lemma,
            "relation": self._handle_relation,
        }
        try:
            handlers[args.command](args)
            return 0
        except EmbeddingError as e:
            print(f"Error: {e}")
            if e.report is not None:
                print(self.storage.dump_json(e.report.to_json()), end="")
            return 1
        except DOMAIN_ERRORS as e:
            print(f"Error: {e}")
            return 1

    def _handle_compile(self, args):
        strategy = resolve_strategy(args.gadget, args.strategy)
        outcome = self.compile_usecase.compile(
            args.path,
            strategy,
            args.format,
            args.graph,
            args.placement,
            args.normalize,
            args.h_range,
            args.j_range,
        )
        if args.report:
            self.storage.write_json(args.report, outcome.report)

        # stdout carries the model alone unless it went to --output
        if args.output:
            self.storage.save_model(args.output, outcome.model)
            summary = sys.stdout
        else:
            if args.format == "qubo":
                print(outcome.model.to_text(), end="")
            else:
                print(self.storage.dump_json(outcome.model.to_json()), end="")
            summary = sys.stderr

        if args.json:
            print(self.storage.dump_json(outcome.report), end="", file=summary)
        else:
            self._print_compile_summary(outcome, args.normalize, summary)

    def _print_compile_summary(self, outcome, normalized: bool, stream):
        report = outcome.report
        lines = [
            "-" * 40,
            f"Input:          {report['input']}",
            f"Format:         {report['format']}",
            f"Variables:      {report['num_vars']}",
            f"Constraints:    {report['num_constraints']}",
            f"Qubits:         {report['num_qubits']}",
            f"Energy gap:     {report['energy_gap'] or 'n/a'}",
        ]
        if normalized:
            lines.append(f"Scale:          {report['scale']}")
            lines.append(f"Normalized gap: {report['normalized_energy_gap'] or 'n/a'}")
        if outcome.compiled is not None:
            compiled = outcome.compiled
            lines.append(f"Clauses:        {compiled.num_clauses}")
            lines.append(f"Aux variables:  {compiled.num_aux}")
            lines.append(f"Sum(alpha-1):   {compiled.sum_alpha_minus_one}")
            lines.append(f"Sum(beta-alpha):{compiled.sum_beta_minus_alpha}")
            lines.append(f"Unsat if Cost >= {compiled.unsat_threshold}")
        if outcome.chains is not None:
            chains = outcome.chains
            lines.append(f"Chain qubits:   {chains.added_qubits}")
            lines.append(f"Chain links:    {chains.added_constraints}")
            if chains.weak_chains:
                lines.append(f"Weak chains:    {len(chains.weak_chains)}")
        print("\n".join(lines), file=stream)

    def _handle_verify(self, args):
        if os.path.isfile(args.gadget):
            outcome = self.verify_usecase.verify_file(args.gadget, args.width)
            name = args.gadget
        else:
            outcome = self.verify_usecase.verify_gadget(args.gadget, args.width)
            name = outcome.params.name
        certificate = outcome.certificate
        if args.json:
            data = {"name": name, "width": args.width, "certificate": certificate.to_json()}
            if outcome.discrepancies:
                data["discrepancies"] = outcome.discrepancies
            print(self.storage.dump_json(data), end="")
            return
        print(f"{name} (k={args.width}): {certificate.summary()}")
        if certificate.offset:
            print(f"  constant offset: {certificate.offset}")
        for note in outcome.discrepancies:
            print(f"  warning: {note}")

    def _handle_solve(self, args):
        outcome = self.solve_usecase.solve(args.path, args.method, args.seed, args.lz_c)
        label = "Cost" if outcome.kind == "m2x" else "Energy"
        print(f"{label}: {outcome.value}")
        print(f"Assignment: {outcome.assignment}")
        if outcome.success_probability is not None:
            print(f"Landau-Zener success estimate: {outcome.success_probability:.6f}")

    def _handle_search(self, args):
        if args.certify is not None:
            problem = SearchProblem(args.k, args.aux, not args.no_strict)
            searcher = GadgetSearcher(seed=args.seed)
            optimality = searcher.certify_optimality(problem, Fraction(args.certify), args.heuristic)
            print(f"Energy gap {args.certify} for k={args.k}, aux={args.aux}: {optimality.value}")
            return
        result, optimality = self.search_usecase.search(
            args.k, args.aux, not args.no_strict, args.heuristic, args.seed
        )
        data = result.to_json()
        data["optimality"] = optimality.value
        print(self.storage.dump_json(data), end="")

    def _handle_catalog(self, args):
        names = args.names or None
        for name in names or []:
            if name not in CATALOG_WIDTHS and name != "bian-equivalence":
                raise UnknownGadgetError(name)
        entries = self.catalog_usecase.dump(names)
        if args.output:
            self.storage.write_json(args.output, entries)
            print(f"Wrote {len(entries)} catalog entries to {args.output}")
        else:
            print(self.storage.dump_json(entries), end="")

    def _handle_tree_lemma(self, args):
        report = self.catalog_usecase.tree_lemma(args.k, args.shape)
        print(f"Tree {report.shape} with {report.k} leaves, {report.num_constraints} constraints")
        for statement in report.statements:
            mark = "ok" if statement.holds else "FAILED"
            print(f"  [{mark}] {statement.name}: {statement.details}")

    def _handle_relation(self, args):
        strategy = resolve_strategy(args.gadget, args.strategy)
        report = self.catalog_usecase.relation(args.path, strategy)
        print(f"MaxSAT:   Opt={report.opt} Cost={report.cost}")
        print(f"Compiled: Opt={report.compiled_opt} Cost={report.compiled_cost}")
        print(f"Predicted: Opt={report.predicted_opt} Cost={report.predicted_cost}")
        for statement in report.statements:
            mark = "ok" if statement.holds else "FAILED"
            print(f"  [{mark}] {statement.name}: {statement.details}")


def main(argv=None) -> int:
    """CLI entry point"""
    cli = CLIInterface()
    return cli.run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
