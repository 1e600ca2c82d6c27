"""Tests for the two-terminal multigraph and its file format."""
# 3rd party
import pytest

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import (Graph,
                               validate,
                               read_graph,
                               parse_graph,
                               format_graph,
                               total_pieces,
                               to_networkx,
                               degree_distinct,
                               parallel_groups,
                               induced_subgraph,
                               is_connected_pair)
from tdsp_reduce.errors import ParseError, StructuralError

from .conftest import shift, data_file


def test_keys_are_never_reused(path_graph):
    key = path_graph.add_edge(1, 3, shift(5), shift(5))
    assert key == 3
    path_graph.remove_edge(key)
    assert path_graph.add_edge(1, 3, shift(5), shift(5)) == 4
    assert sorted(path_graph.edges) == [1, 2, 4]


def test_arrival_follows_orientation():
    graph = Graph((1, 2))
    key = graph.add_edge(2, 1, shift(3), pwl.infinity())
    assert graph.arrival(key, 2) == shift(3)
    assert graph.arrival(key, 1) == pwl.infinity()
    with pytest.raises(StructuralError):
        graph.edges[key].departing(7)


def test_degree_distinct_ignores_loops_and_multiplicity():
    graph = Graph(range(1, 4))
    graph.add_edge(1, 2, shift(1), shift(1))
    graph.add_edge(2, 1, shift(2), shift(2))
    graph.add_edge(2, 2, shift(1), shift(1))
    graph.add_edge(2, 3, shift(1), shift(1))
    assert degree_distinct(graph, 2) == 2
    assert degree_distinct(graph, 3) == 1
    assert graph.neighbors(2) == [1, 3]
    assert parallel_groups(graph) == [(1, 2)]


def test_remove_vertex_removes_incident_edges(cycle4):
    removed = cycle4.remove_vertex(2)
    assert sorted(edge.key for edge in removed) == [1, 2]
    assert 2 not in cycle4
    assert cycle4.neighbors(1) == [4]
    with pytest.raises(StructuralError):
        cycle4.incident(2)


def test_copy_is_independent(path_graph):
    clone = path_graph.copy()
    clone.remove_vertex(2)
    assert len(path_graph) == 3
    assert sorted(path_graph.edges) == [1, 2]
    assert clone.terminals == (1, 3)


def test_unknown_endpoint_and_terminal():
    graph = Graph((1, 2))
    with pytest.raises(StructuralError):
        graph.add_edge(1, 3, shift(1), shift(1))
    with pytest.raises(StructuralError):
        graph.set_terminals(1, 5)


def test_induced_subgraph(cycle4):
    sub = induced_subgraph(cycle4, (1, 2, 3))
    assert sub.vertices == [1, 2, 3]
    assert sorted(sub.edges) == [1, 2]
    assert sub.terminals == (1, 3)
    assert induced_subgraph(cycle4, (1, 2)).terminals is None
    with pytest.raises(StructuralError):
        induced_subgraph(cycle4, (1, 9))


def test_total_pieces():
    graph = Graph((1, 2))
    graph.add_edge(1, 2, pwl.from_points([(0, 1), (4, 5)], 2), pwl.infinity())
    assert total_pieces(graph) == 2
    graph.add_edge(1, 2, shift(1), shift(1))
    assert total_pieces(graph) == 4


def test_validate_names_edge_and_direction():
    graph = Graph((1, 2))
    graph.add_edge(1, 2, shift(1), shift(1))
    key = graph.add_edge(1, 2, shift(1), shift(-1))
    (violation,) = validate(graph)
    assert (violation.edge_key, violation.tail, violation.head) == (key, 2, 1)
    assert str(violation).startswith(f"edge {key} (2->1)")


def test_networkx_view(cycle4):
    cycle4.add_edge(1, 2, shift(1), shift(1))
    nxg = to_networkx(cycle4)
    assert nxg.number_of_edges(1, 2) == 2
    assert is_connected_pair(cycle4, 1, 3)
    cycle4.add_vertex(9)
    assert not is_connected_pair(cycle4, 1, 9)


def test_read_ladder():
    graph = read_graph(data_file("ladder.tdg"))
    assert len(graph) == 8
    assert graph.terminals == (1, 8)
    assert len(graph.edges) == 10
    assert graph.arrival(2, 2) == pwl.from_points([(0, 1), (4, 5)], 2)
    assert graph.arrival(2, 3) == shift(1)
    assert validate(graph) == []


def test_format_then_parse(ladder6):
    text = format_graph(ladder6, comment="ladder")
    assert text.startswith("c ladder\np tdg 6 1 6\n")
    again = parse_graph(text.splitlines())
    assert again.terminals == ladder6.terminals
    assert {k: (e.u, e.v, e.forward, e.backward) for k, e in again.edges.items()} == {
        k: (e.u, e.v, e.forward, e.backward) for k, e in ladder6.edges.items()
    }


def test_format_needs_consecutive_vertices():
    with pytest.raises(StructuralError):
        format_graph(Graph((1, 3)))


@pytest.mark.parametrize("lines, lineno", [
    (["p tdg 2 1 2", "e 1 2 0:1@1"], 2),
    (["p tdg 2 1 2", "e 1 3 0:1@1 0:1@1"], 2),
    (["p tdg 2 1 2", "e 1 2 0:1;0:2@1 0:1@1"], 2),
    (["c fine", "p tdg 2 1 x"], 2),
    (["p tdg 2 1 5"], 1),
    (["e 1 2 0:1@1 0:1@1"], 1),
    (["p tdg 2 1 2", "", "p tdg 2 1 2"], 3),
    (["p tdg 2 1 2", "x 1 2"], 2),
])
def test_parse_errors_carry_line_numbers(lines, lineno):
    with pytest.raises(ParseError) as exc_info:
        parse_graph(lines, source="bad.tdg")
    assert exc_info.value.lineno == lineno
    assert str(exc_info.value).startswith(f"bad.tdg:{lineno}: ")


def test_parse_missing_header():
    with pytest.raises(ParseError, match="missing"):
        parse_graph(["c only a comment"])
