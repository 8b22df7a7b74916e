import pytest

from xorgadget_hub.core.embedding import CouplingGraph, chain_rewrite
from xorgadget_hub.core.exceptions import EmbeddingError, ModelFormatError
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint, exhaustive_opt


@pytest.fixture
def ring(storage, data_dir) -> CouplingGraph:
    return storage.load_graph(data_dir / "ring6.graph")


def test_ring_graph_file(ring):
    assert ring.nodes == [1, 2, 3, 4, 5, 6]
    assert len(ring.edges) == 6
    assert ring.has_edge(6, 1)


def test_adjacent_pairs_are_kept(ring):
    problem = Max2XorProblem(2, (XorConstraint.pair(1, 2, 1, 1), XorConstraint.unary(2, 0, 1)))
    embedded, report = chain_rewrite(problem, {1: 1, 2: 2}, ring)
    assert report.added_qubits == 0
    assert report.chains == ()
    assert set(embedded.constraints) == set(problem.constraints)


def test_distant_pair_is_chained(ring):
    problem = Max2XorProblem(3, (XorConstraint.pair(1, 3, 1, 1),))
    embedded, report = chain_rewrite(problem, {1: 1, 3: 3}, ring)
    assert report.added_qubits == 1
    assert report.added_constraints == 1
    assert report.qubits_used == 3
    (chain,) = report.chains
    assert chain.path == (1, 2, 3)
    assert not chain.weak
    assert embedded.num_vars == 6
    assert set(embedded.constraints) == {XorConstraint.pair(1, 2, 0, 1), XorConstraint.pair(2, 3, 1, 1)}
    assert exhaustive_opt(embedded).cost == exhaustive_opt(problem).cost


def test_light_chains_are_reported_weak(ring):
    problem = Max2XorProblem(4, (XorConstraint.pair(1, 4, 0, 2),))
    _, report = chain_rewrite(problem, {1: 1, 4: 4}, ring, chain_weight=1)
    assert [chain.path for chain in report.weak_chains] == [(1, 2, 3, 4)]
    assert report.to_json()["chain_weight"] == "1"


def test_chains_avoid_occupied_qubits(ring):
    problem = Max2XorProblem(3, (XorConstraint.pair(1, 3, 0, 1),))
    _, report = chain_rewrite(problem, {1: 1, 2: 2, 3: 3}, ring)
    assert report.chains[0].path == (1, 6, 5, 4, 3)
    assert report.added_qubits == 3


def test_unroutable_constraint():
    graph = CouplingGraph([(1, 2), (2, 3)])
    problem = Max2XorProblem(3, (XorConstraint.pair(1, 3, 0, 1), XorConstraint.unary(2, 1, 1)))
    with pytest.raises(EmbeddingError) as excinfo:
        chain_rewrite(problem, {1: 1, 2: 2, 3: 3}, graph)
    assert excinfo.value.failures == [XorConstraint.pair(1, 3, 0, 1)]
    assert excinfo.value.report.failures == (XorConstraint.pair(1, 3, 0, 1),)


def test_invalid_placements(ring):
    problem = Max2XorProblem(2, (XorConstraint.pair(1, 2, 0, 1),))
    with pytest.raises(ValueError):
        chain_rewrite(problem, {1: 1, 2: 1}, ring)
    with pytest.raises(ValueError):
        chain_rewrite(problem, {1: 1}, ring)
    with pytest.raises(ValueError):
        chain_rewrite(problem, {1: 1, 2: 9}, ring)
    with pytest.raises(ValueError):
        chain_rewrite(problem, {1: 1, 2: 2}, ring, chain_weight=0)


def test_disconnected_placement():
    graph = CouplingGraph([(1, 2), (3, 4)])
    problem = Max2XorProblem(2, (XorConstraint.pair(1, 2, 0, 1),))
    with pytest.raises(ValueError):
        chain_rewrite(problem, {1: 1, 2: 3}, graph)


def test_graph_text_errors():
    with pytest.raises(ModelFormatError):
        CouplingGraph.from_text("1 2 3\n")
    with pytest.raises(ModelFormatError):
        CouplingGraph.from_text("1 a\n")
    with pytest.raises(ModelFormatError):
        CouplingGraph.from_text("2 2\n")
    with pytest.raises(ValueError):
        CouplingGraph([(0, 1)])


def test_graph_text_round_trip(ring):
    assert CouplingGraph.from_text(ring.to_text()).edges == ring.edges
