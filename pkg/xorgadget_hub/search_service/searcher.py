import logging
from enum import Enum
from fractions import Fraction

from xorgadget_hub.core.certify import certify_gadget
from xorgadget_hub.core.exceptions import SearchInfeasibleError, SearchLimitError
from xorgadget_hub.core.gadgets import GadgetApplication, GadgetParams
from xorgadget_hub.infra.settings import settings

from .config import SearchConfig
from .methods import ExactSearch, HeuristicSearch
from .model import Candidate, SearchProblem, SearchResult


class Optimality(Enum):
    PROVEN = "proven"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


class GadgetSearcher:
    """Main class for finding gadgets with the largest energy gap"""

    def __init__(self, config: SearchConfig = None, seed: int | None = None):
        self.config = config or SearchConfig()
        self.seed = settings.default_seed if seed is None else seed
        self.logger = logging.getLogger(__name__)

    def search(self, problem: SearchProblem, heuristic: bool = False) -> SearchResult:
        """
        Run the search for one (k, aux) pair.

        The heuristic always runs first; in exact mode its best gadget seeds
        branch and bound as the incumbent.
        """
        self.logger.info(
            f"Searching gadgets for k={problem.k}, aux={problem.num_aux} "
            f"({'heuristic' if heuristic else 'exact'}, strict={problem.strict_required})"
        )
        warm = HeuristicSearch(problem, self.config, self.seed)
        candidate = warm.maximize_gap()

        if heuristic:
            if candidate is None:
                self.logger.warning("Heuristic search found no gadget; infeasibility is not proven")
                raise SearchInfeasibleError(problem.k, problem.num_aux)
            return self._result(problem, warm.minimize_weight(candidate), False, warm.name, warm.nodes)

        exact = ExactSearch(problem, self.config)
        candidate = exact.maximize_gap(candidate)
        if candidate is None:
            raise SearchInfeasibleError(problem.k, problem.num_aux)
        candidate = exact.minimize_weight(candidate)
        return self._result(problem, candidate, True, exact.name, warm.nodes + exact.nodes)

    def certify_optimality(self, problem: SearchProblem, claimed_delta_e, heuristic: bool = False) -> Optimality:
        """PROVEN iff exact search shows the largest achievable gap equals the claim"""
        if heuristic:
            return Optimality.UNKNOWN
        claimed = Fraction(claimed_delta_e)
        warm = HeuristicSearch(problem, self.config, self.seed).maximize_gap()
        try:
            best = ExactSearch(problem, self.config).maximize_gap(warm)
        except SearchLimitError as e:
            self.logger.warning(f"Optimality unknown: {e}")
            return Optimality.UNKNOWN
        if best is None:
            return Optimality.REFUTED
        return Optimality.PROVEN if best.delta_e == claimed else Optimality.REFUTED

    def _result(self, problem: SearchProblem, candidate: Candidate, optimal: bool, method: str, nodes: int) -> SearchResult:
        fragment = problem.gadget_constraints(candidate)
        name = f"search-k{problem.k}-a{problem.num_aux}"
        placeholder = GadgetParams(name, 1, 1, None, problem.num_aux)
        app = GadgetApplication(fragment, problem.clause.variables, problem.aux_vars, placeholder)
        certificate = certify_gadget(app, problem.clause)

        if certificate.delta_e != candidate.delta_e:
            self.logger.warning(f"Certified gap {certificate.delta_e} differs from the search gap {candidate.delta_e}")
        params = GadgetParams(
            name,
            certificate.alpha,
            certificate.beta,
            certificate.delta_e,
            problem.num_aux,
            certificate.strict,
            "kSAT",
            "2XOR",
        )
        gadget = GadgetApplication(fragment, app.clause_vars, app.aux_vars, params)
        self.logger.info(f"Found {params.caption()} ({'optimal' if optimal else 'best found'})")
        return SearchResult(gadget, params.alpha, params.beta, params.delta_e, optimal, method, nodes)


def search_gadget(problem: SearchProblem, heuristic: bool = False, seed: int | None = None) -> SearchResult:
    return GadgetSearcher(seed=seed).search(problem, heuristic)


def certify_optimality(problem: SearchProblem, claimed_delta_e, heuristic: bool = False) -> Optimality:
    return GadgetSearcher().certify_optimality(problem, claimed_delta_e, heuristic)
