"""
Chain embedding onto a coupling graph.
This module routes pair constraints between non-adjacent qubits along
shortest free paths, copying the variable with equality constraints.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import networkx as nx

from xorgadget_hub.core.exceptions import EmbeddingError, ModelFormatError
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint, simplify, to_fraction
from xorgadget_hub.infra.settings import settings
from xorgadget_hub.logging_config import logger


class CouplingGraph:
    """Hardware graph: which qubit pairs can carry a quadratic term"""

    def __init__(self, edges: Iterable[tuple[int, int]] = (), nodes: Iterable[int] = ()):
        self._graph = nx.Graph()
        for node in nodes:
            self._add_node(node)
        for first, second in edges:
            if first == second:
                raise ValueError(f"Self-loop on qubit {first} is not allowed")
            self._add_node(first)
            self._add_node(second)
            self._graph.add_edge(first, second)

    def _add_node(self, node: int):
        if not isinstance(node, int) or node < 1:
            raise ValueError(f"Qubit ids must be positive integers, got {node!r}")
        self._graph.add_node(node)

    @classmethod
    def from_text(cls, text: str) -> "CouplingGraph":
        """One 'u v' edge per line; '#' and 'c' lines are comments"""
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts or parts[0] in ("#", "c"):
                continue
            if len(parts) != 2:
                raise ModelFormatError("graph", f"line {lineno}: expected 'u v'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ModelFormatError("graph", f"line {lineno}: '{raw.strip()}'") from None
        try:
            return cls(edges)
        except ValueError as e:
            raise ModelFormatError("graph", str(e)) from e

    def to_text(self) -> str:
        return "".join(f"{first} {second}\n" for first, second in self.edges)

    @property
    def graph(self) -> nx.Graph:
        return self._graph

    @property
    def nodes(self) -> list[int]:
        return sorted(self._graph.nodes)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((min(edge), max(edge)) for edge in self._graph.edges)

    def has_node(self, node: int) -> bool:
        return self._graph.has_node(node)

    def has_edge(self, first: int, second: int) -> bool:
        return self._graph.has_edge(first, second)

    def neighbors(self, node: int) -> list[int]:
        return sorted(self._graph.neighbors(node))

    def connects(self, qubits: Iterable[int]) -> bool:
        """True when all qubits lie in one connected component"""
        qubits = list(qubits)
        if not qubits:
            return True
        component = nx.node_connected_component(self._graph, qubits[0])
        return all(qubit in component for qubit in qubits)


@dataclass(frozen=True)
class ChainRecord:
    """A routed constraint and the qubit path it was carried along"""

    constraint: XorConstraint
    path: tuple[int, ...]
    weak: bool

    def to_json(self) -> dict:
        return {"constraint": self.constraint.to_json(), "path": list(self.path), "weak": self.weak}


@dataclass(frozen=True)
class ChainReport:
    chains: tuple[ChainRecord, ...]
    added_qubits: int
    added_constraints: int
    qubits_used: int
    chain_weight: Fraction
    failures: tuple[XorConstraint, ...] = ()

    @property
    def weak_chains(self) -> tuple[ChainRecord, ...]:
        """Chains whose weight is below the weight of the constraint they carry"""
        return tuple(chain for chain in self.chains if chain.weak)

    def to_json(self) -> dict:
        return {
            "added_qubits": self.added_qubits,
            "added_constraints": self.added_constraints,
            "qubits_used": self.qubits_used,
            "chain_weight": str(self.chain_weight),
            "chains": [chain.to_json() for chain in self.chains],
            "failures": [failure.to_json() for failure in self.failures],
        }


def _free_path(graph: CouplingGraph, source: int, target: int, occupied: set[int]) -> list[int] | None:
    """Breadth-first shortest path through free qubits, smallest ids first"""
    parents = {source: None}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for neighbor in graph.neighbors(node):
            if neighbor in parents:
                continue
            if neighbor == target:
                path = [target, node]
                while parents[path[-1]] is not None:
                    path.append(parents[path[-1]])
                return path[::-1]
            if neighbor in occupied:
                continue
            parents[neighbor] = node
            queue.append(neighbor)
    return None


def chain_rewrite(
    problem: Max2XorProblem,
    placement: Mapping[int, int],
    graph: CouplingGraph,
    chain_weight=None,
) -> tuple[Max2XorProblem, ChainReport]:
    """
    Rewrite a problem onto qubits, chaining pair constraints across the graph.

    Raises EmbeddingError listing every constraint without a free path.
    """
    weight = settings.chain_weight if chain_weight is None else to_fraction(chain_weight)
    if weight <= 0:
        raise ValueError("Chain weight must be positive")
    qubits = list(placement.values())
    if len(set(qubits)) != len(qubits):
        raise ValueError("Placement must map variables to distinct qubits")
    missing = sorted(problem.variables - set(placement))
    if missing:
        raise ValueError(f"Variables without a qubit: {missing}")
    for qubit in qubits:
        if not graph.has_node(qubit):
            raise ValueError(f"Qubit {qubit} is not in the coupling graph")
    used = [placement[var] for var in sorted(problem.variables)]
    if not graph.connects(used):
        raise ValueError("Placed qubits are not connected in the coupling graph")

    occupied = set(qubits)
    constraints: list[XorConstraint] = []
    chains: list[ChainRecord] = []
    failures: list[XorConstraint] = []
    added_qubits = 0

    for constraint in problem.constraints:
        if constraint.is_unary:
            constraints.append(XorConstraint.unary(placement[constraint.scope[0]], constraint.rhs, constraint.weight))
            continue
        first, second = (placement[var] for var in constraint.scope)
        if graph.has_edge(first, second):
            constraints.append(XorConstraint.pair(first, second, constraint.rhs, constraint.weight))
            continue
        path = _free_path(graph, first, second, occupied)
        if path is None:
            logger.warning(f"No free path for constraint {constraint}")
            failures.append(constraint)
            continue
        inner = path[1:-1]
        occupied.update(inner)
        added_qubits += len(inner)
        for left, right in zip(path[:-2], path[1:-1]):
            constraints.append(XorConstraint.pair(left, right, 0, weight))
        constraints.append(XorConstraint.pair(path[-2], second, constraint.rhs, constraint.weight))
        chains.append(ChainRecord(constraint, tuple(path), weight < constraint.weight))

    report = ChainReport(
        chains=tuple(chains),
        added_qubits=added_qubits,
        added_constraints=sum(len(chain.path) - 2 for chain in chains),
        qubits_used=len(set(used)) + added_qubits,
        chain_weight=weight,
        failures=tuple(failures),
    )
    if failures:
        raise EmbeddingError(list(failures), report)

    num_vars = max(graph.nodes, default=0)
    return simplify(Max2XorProblem(num_vars, tuple(constraints), problem.offset)), report
