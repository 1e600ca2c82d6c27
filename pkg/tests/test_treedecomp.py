"""Tests for tree decompositions, nice form and removal planning."""
# 3rd party
import pytest
import networkx as nx

# local
from tdsp_reduce.graph import Graph, read_graph
from tdsp_reduce.errors import ParseError, StructuralError
from tdsp_reduce.treedecomp import (LEAF_BAG,
                                    PATH_ROOT,
                                    NOT_A_TREE,
                                    CONNECTIVITY,
                                    EDGE_COVERAGE,
                                    PATH_INTERIOR,
                                    UNKNOWN_VERTEX,
                                    VERTEX_COVERAGE,
                                    RemovalPlan,
                                    TreeDecomposition,
                                    NiceTreeDecomposition,
                                    width,
                                    leaves,
                                    is_path,
                                    make_nice,
                                    check_nice,
                                    split_components,
                                    find_removal_plan,
                                    balanced_separator,
                                    read_decomposition,
                                    parse_decomposition,
                                    prune_subset_leaves,
                                    format_decomposition,
                                    update_after_removal,
                                    validate_decomposition,
                                    heuristic_decomposition,
                                    restrict_decomposition)

from .conftest import shift, data_file


def topology(n, edges, terminals=None):
    graph = Graph(range(1, n + 1), terminals=terminals)
    for u, v in edges:
        graph.add_edge(u, v, shift(1), shift(1))
    return graph


def path_td(bags):
    return TreeDecomposition(dict(enumerate(bags, 1)), [(i, i + 1) for i in range(1, len(bags))])


def nice_path(bags):
    return NiceTreeDecomposition(
        dict(enumerate(bags, 1)), [(i, i + 1) for i in range(1, len(bags))]
    )


def conditions(violations):
    return [violation.condition for violation in violations]


def test_validate_accepts_path():
    graph = topology(3, [(1, 2), (2, 3)])
    assert validate_decomposition(graph, path_td([{1, 2}, {2, 3}])) == []


def test_validate_coverage():
    graph = topology(3, [(1, 2), (2, 3)])
    violations = validate_decomposition(graph, path_td([{1, 2}]))
    assert conditions(violations) == [VERTEX_COVERAGE, EDGE_COVERAGE]
    assert violations[0].witness == 3
    assert violations[1].witness == (2, 3)


def test_validate_connectivity():
    graph = topology(2, [(1, 2)])
    violations = validate_decomposition(graph, path_td([{1, 2}, {2}, {1, 2}]))
    assert conditions(violations) == [CONNECTIVITY]
    assert violations[0].witness == 1


def test_validate_not_a_tree_and_unknown_vertex():
    graph = topology(2, [(1, 2)])
    cyclic = TreeDecomposition({1: {1, 2}, 2: {2}, 3: {1, 2}}, [(1, 2), (2, 3), (3, 1)])
    assert conditions(validate_decomposition(graph, cyclic)) == [NOT_A_TREE]
    forest = TreeDecomposition({1: {1, 2}, 2: {2}})
    assert conditions(validate_decomposition(graph, forest)) == [NOT_A_TREE]
    extra = path_td([{1, 2}, {2, 7}])
    assert conditions(validate_decomposition(graph, extra)) == [UNKNOWN_VERTEX]


def test_tree_edges_must_name_bags():
    with pytest.raises(StructuralError):
        TreeDecomposition({1: {1}}, [(1, 2)])


def test_width():
    assert width(path_td([{1, 2}, {2, 3, 4}])) == 2
    assert width(TreeDecomposition({1: ()})) == -1
    with pytest.raises(StructuralError):
        width(TreeDecomposition({}))


def test_make_nice_inserts_intermediate_bags():
    td = TreeDecomposition({1: {1, 2, 3}, 2: {1, 4}}, [(1, 2)])
    assert check_nice(td) == [(1, 2)]
    nice = make_nice(td)
    assert isinstance(nice, NiceTreeDecomposition)
    assert check_nice(nice) == []
    assert width(nice) == 2
    assert nice.bags[3] == {1, 2}
    assert nice.bags[4] == {1}
    assert nice.tree_edges == [(1, 3), (2, 4), (3, 4)]
    graph = topology(4, [(1, 2), (2, 3), (1, 3), (1, 4)])
    assert validate_decomposition(graph, nice) == []


def test_nice_constructor_rejects():
    with pytest.raises(StructuralError) as exc_info:
        nice_path([{1, 2}, {3, 4}])
    assert exc_info.value.assumption == "nice"


def test_prune_collapses_equal_chain():
    pruned = prune_subset_leaves(nice_path([{1, 2}, {1, 2}, {1, 2}]))
    assert list(pruned.bags.values()) == [{1, 2}]


def test_prune_removes_subset_leaf_only():
    pruned = prune_subset_leaves(nice_path([{1, 2}, {2}, {2, 3}, {3}]))
    assert sorted(pruned.bags) == [1, 2, 3]


def test_plan_leaf_bag():
    td = nice_path([{1, 2}, {2}, {2, 3}, {2}, {2, 4}])
    plan = find_removal_plan(td, (1, 3))
    assert (plan.vertex, plan.bag_index, plan.case_tag) == (4, 5, LEAF_BAG)
    assert plan.expected_degree_bound == 1


def test_plan_three_leaves_two_terminals():
    td = NiceTreeDecomposition(
        {1: {1, 2}, 2: {2, 3}, 3: {2, 5}, 4: {2}}, [(4, 1), (4, 2), (4, 3)]
    )
    assert not is_path(td)
    assert leaves(td) == [1, 2, 3]
    plan = find_removal_plan(td, (1, 3))
    assert (plan.vertex, plan.bag_index, plan.case_tag) == (5, 3, LEAF_BAG)


def test_plan_prefers_low_degree():
    td = NiceTreeDecomposition(
        {1: {1, 2}, 2: {2, 3}, 3: {2, 5}, 4: {2}}, [(4, 1), (4, 2), (4, 3)]
    )
    graph = topology(5, [(1, 2), (2, 3)], terminals=(1, 2))
    assert find_removal_plan(td, (1, 2)).vertex == 3
    assert find_removal_plan(td, (1, 2), graph).vertex == 5


def test_plan_path_root_then_done():
    # {s,a},{a,b},{b} with d = b, made nice and pruned
    td = prune_subset_leaves(make_nice(path_td([{1, 2}, {2, 3}, {3}])))
    assert is_path(td)
    plan = find_removal_plan(td, (1, 3))
    assert (plan.vertex, plan.case_tag, plan.anchor) == (2, PATH_ROOT, 1)
    assert plan.expected_degree_bound == 2
    after = update_after_removal(td, plan)
    assert list(after.bags.values()) == [{1, 3}]
    assert find_removal_plan(after, (1, 3)) is None


def test_plan_path_interior():
    td = nice_path([{1, 2}, {2}, {2, 3}, {3}, {3, 5}])
    plan = find_removal_plan(td, (1, 5))
    assert plan == RemovalPlan(2, 3, PATH_INTERIOR, 2, anchor=1, merged_bags=(1, 2, 3))
    after = update_after_removal(td, plan)
    assert after.bags == {3: {1, 3}, 4: {3}, 5: {3, 5}}
    assert after.tree_edges == [(3, 4), (4, 5)]


def test_plan_rejects_unpruned_and_plain():
    with pytest.raises(StructuralError) as exc_info:
        find_removal_plan(nice_path([{1, 2}, {2}]), (1, 3))
    assert exc_info.value.assumption == "A2"
    with pytest.raises(StructuralError) as exc_info:
        find_removal_plan(path_td([{1, 2}, {2, 3}]), (1, 3))
    assert exc_info.value.assumption == "nice"


def test_plan_single_bag():
    assert find_removal_plan(nice_path([{1, 3}]), (1, 3)) is None
    plan = find_removal_plan(nice_path([{1, 2, 3}]), (1, 3))
    assert (plan.vertex, plan.case_tag, plan.expected_degree_bound) == (2, PATH_ROOT, 2)


def test_update_rejects_mismatched_plan():
    td = nice_path([{1, 2}, {2}, {2, 3}])
    with pytest.raises(StructuralError):
        update_after_removal(td, RemovalPlan(3, 1, LEAF_BAG, 1, merged_bags=(1,)))
    with pytest.raises(StructuralError):
        update_after_removal(td, RemovalPlan(2, 1, LEAF_BAG, 1, merged_bags=(1,)))


def test_restrict_decomposition():
    td = nice_path([{1, 2}, {2}, {2, 3}])
    restricted = restrict_decomposition(td, (2, 3))
    assert isinstance(restricted, NiceTreeDecomposition)
    assert restricted.bags == {1: {2}, 2: {2}, 3: {2, 3}}


@pytest.mark.parametrize("nxg, expected", [
    (nx.balanced_tree(2, 3), 1),
    (nx.complete_graph(5), 4),
    (nx.cycle_graph(6), 2),
])
def test_heuristic_width(nxg, expected):
    nxg = nx.convert_node_labels_to_integers(nxg, first_label=1)
    graph = topology(nxg.number_of_nodes(), nxg.edges)
    td = heuristic_decomposition(graph)
    assert width(td) == expected
    assert validate_decomposition(graph, td) == []
    assert sorted(td.bags) == list(range(1, len(td) + 1))


def test_heuristic_tiny_graphs():
    assert width(heuristic_decomposition(Graph((1,)))) == 0
    assert heuristic_decomposition(Graph()).bags == {1: frozenset()}


def test_balanced_separator_on_path():
    graph = topology(9, [(u, u + 1) for u in range(1, 9)])
    td = path_td([{u, u + 1} for u in range(1, 9)])
    separator, side1, side2 = balanced_separator(graph, td)
    assert separator == {5}
    assert (side1, side2) == ({1, 2, 3, 4}, {6, 7, 8, 9})


def test_balanced_separator_on_star():
    graph = topology(9, [(1, u) for u in range(2, 10)])
    td = path_td([{1, u} for u in range(2, 10)])
    separator, side1, side2 = balanced_separator(graph, td)
    assert separator == {1}
    assert side1 == {2, 3, 4}
    assert side2 == {5, 6, 7, 8, 9}


def test_balanced_separator_on_ladder():
    graph = read_graph(data_file("ladder.tdg"))
    separator, side1, side2 = balanced_separator(graph, read_decomposition(data_file("ladder.td")))
    assert separator == {2, 6}
    assert (side1, side2) == ({3, 4, 7, 8}, {1, 5})


def test_balanced_separator_needs_enough_vertices():
    graph = topology(4, [(1, 2), (2, 3), (3, 4)])
    with pytest.raises(StructuralError, match="too small"):
        balanced_separator(graph, path_td([{1, 2}, {2, 3}, {3, 4}]))


def test_split_components():
    graph = topology(7, [(1, 2), (2, 3), (5, 6)])
    side1, side2 = split_components(graph, {4})
    assert side1 == {1, 2, 3}
    assert side2 == {5, 6, 7}


def test_read_ladder_decomposition():
    td = read_decomposition(data_file("ladder.td"))
    assert len(td) == 6
    assert width(td) == 2
    assert is_path(td)
    assert validate_decomposition(read_graph(data_file("ladder.tdg")), td) == []


def test_format_renumbers_bags():
    td = TreeDecomposition({4: {1, 2}, 9: {2, 3}}, [(4, 9)])
    assert format_decomposition(td, 3) == "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n"


@pytest.mark.parametrize("lines, lineno", [
    (["s td 1 2 2", "b x 1"], 2),
    (["b 1 1 2"], 1),
    (["s td 1 2 2", "b 1 1 2", "b 1 2"], 3),
    (["s td 2 2 3", "b 1 1 2", "b 2 2 3", "1 3"], 4),
    (["s td 2 2 3", "s td 2 2 3"], 2),
    (["s td 2 2 3", "b 1 1 2", "1 2 3"], 3),
])
def test_parse_decomposition_errors(lines, lineno):
    with pytest.raises(ParseError) as exc_info:
        parse_decomposition(lines, source="bad.td")
    assert exc_info.value.lineno == lineno


def test_parse_decomposition_tolerates_duplicates():
    td = parse_decomposition(["c x", "s td 2 2 3", "b 1 1 2", "b 2 2 3", "1 2", "2 1"])
    assert td.tree_edges == [(1, 2)]


def test_parse_decomposition_keeps_message():
    with pytest.raises(ParseError, match="duplicate bag id 1"):
        parse_decomposition(["s td 1 2 2", "b 1 1 2", "b 1 2"], source="bad.td")
