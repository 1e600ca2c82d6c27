"""
Tree decompositions, nice tree decompositions and removal planning.

A decomposition is a family of bags (vertex sets) indexed by integers,
arranged in a tree held as a :class:`networkx.Graph` over bag indices.  The
reduction loop repeatedly asks :func:`find_removal_plan` for a non-terminal
vertex whose neighbors all lie in a small set of bags, star-mesh transforms
it away, then calls :func:`update_after_removal` to keep the decomposition
valid, nice and no wider than before.

Decompositions are read and written in the PACE ``.td`` format::

    c comment
    s td <bag-count> <max-bag-size> <vertex-count>
    b <bag-id> <vertex> <vertex> ...
    <bag-id> <bag-id>
"""
# std imports
import os
import logging
from fractions import Fraction
from typing import Dict, List, Tuple, Iterable, Optional, NamedTuple, FrozenSet
from dataclasses import dataclass

# 3rd party
import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

# local
from tdsp_reduce.graph import Graph, to_networkx, degree_distinct
from tdsp_reduce.errors import ParseError, StructuralError

log = logging.getLogger(__name__)

LEAF_BAG = "leaf_bag"
PATH_INTERIOR = "path_interior"
PATH_ROOT = "path_root"

NOT_A_TREE = "not_a_tree"
VERTEX_COVERAGE = "vertex_coverage"
UNKNOWN_VERTEX = "unknown_vertex"
EDGE_COVERAGE = "edge_coverage"
CONNECTIVITY = "connectivity"


class TreeDecomposition:
    """Bags indexed by integers, joined by tree edges."""

    def __init__(self, bags, tree_edges=(), root: Optional[int] = None):
        self.bags: Dict[int, FrozenSet[int]] = {
            idx: frozenset(bag) for idx, bag in sorted(dict(bags).items())
        }
        self.tree = nx.Graph()
        self.tree.add_nodes_from(self.bags)
        for i, j in tree_edges:
            if i not in self.bags or j not in self.bags:
                raise StructuralError(f"tree edge ({i}, {j}) names an unknown bag")
            self.tree.add_edge(i, j)
        if root is not None and root not in self.bags:
            raise StructuralError(f"root {root} is not a bag")
        self.root = root

    def __len__(self):
        return len(self.bags)

    def __repr__(self):
        return f"{type(self).__name__}(bags={len(self.bags)}, tree_edges={self.tree.number_of_edges()})"

    @property
    def tree_edges(self) -> List[Tuple[int, int]]:
        return sorted(tuple(sorted(edge)) for edge in self.tree.edges)

    def neighbors(self, idx: int) -> List[int]:
        return sorted(self.tree[idx])

    def vertices(self) -> FrozenSet[int]:
        return frozenset().union(*self.bags.values())

    def copy(self):
        return type(self)(self.bags, self.tree_edges, self.root)


class NiceTreeDecomposition(TreeDecomposition):
    """A decomposition whose adjacent bags are equal or differ by one vertex."""

    def __init__(self, bags, tree_edges=(), root: Optional[int] = None):
        super().__init__(bags, tree_edges, root)
        bad = check_nice(self)
        if bad:
            i, j = bad[0]
            raise StructuralError(
                f"bags {i} {sorted(self.bags[i])} and {j} {sorted(self.bags[j])} "
                "differ by more than one vertex", assumption="nice"
            )


class DecompositionViolation(NamedTuple):
    condition: str
    witness: object

    def __str__(self):
        return f"{self.condition}: {self.witness}"


@dataclass(frozen=True)
class RemovalPlan:
    """
    Vertex chosen for the next star-mesh transformation.

    ``merged_bags`` lists the bags that :func:`update_after_removal` folds
    into ``bag_index``; ``anchor`` is the terminal exclusive to the first
    bag of a path decomposition, when the path cases apply.
    """

    vertex: int
    bag_index: int
    case_tag: str
    expected_degree_bound: int
    anchor: Optional[int] = None
    merged_bags: Tuple[int, ...] = ()


def _structure_violations(td: TreeDecomposition) -> List[DecompositionViolation]:
    if not td.bags:
        return [DecompositionViolation(NOT_A_TREE, "no bags")]
    if not nx.is_tree(td.tree):
        return [DecompositionViolation(NOT_A_TREE, td.tree_edges)]
    violations = []
    for vertex in sorted(td.vertices()):
        holding = [idx for idx, bag in td.bags.items() if vertex in bag]
        if not nx.is_connected(td.tree.subgraph(holding)):
            violations.append(DecompositionViolation(CONNECTIVITY, vertex))
    return violations


def validate_decomposition(graph: Graph, td: TreeDecomposition) -> List[DecompositionViolation]:
    """
    Check the three tree decomposition conditions against ``graph``.

    Every vertex is in some bag, both ends of every edge share a bag, and
    the bags holding any one vertex form a connected subtree.
    """
    violations = _structure_violations(td)
    if violations and violations[0].condition == NOT_A_TREE:
        return violations
    covered = td.vertices()
    for vertex in graph.vertices:
        if vertex not in covered:
            violations.append(DecompositionViolation(VERTEX_COVERAGE, vertex))
    for vertex in sorted(covered - set(graph.vertices)):
        violations.append(DecompositionViolation(UNKNOWN_VERTEX, vertex))
    seen = set()
    for key in sorted(graph.edges):
        edge = graph.edges[key]
        pair = (min(edge.u, edge.v), max(edge.u, edge.v))
        if pair in seen:
            continue
        seen.add(pair)
        if not any(edge.endpoints <= bag for bag in td.bags.values()):
            violations.append(DecompositionViolation(EDGE_COVERAGE, pair))
    return violations


def width(td: TreeDecomposition) -> int:
    if not td.bags:
        raise StructuralError("an empty decomposition has no width")
    return max(len(bag) for bag in td.bags.values()) - 1


def check_nice(td: TreeDecomposition) -> List[Tuple[int, int]]:
    return [
        (i, j)
        for i, j in td.tree_edges
        if len(td.bags[i] ^ td.bags[j]) > 1
    ]


def as_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    if isinstance(td, NiceTreeDecomposition):
        return td
    return NiceTreeDecomposition(td.bags, td.tree_edges, td.root)


def make_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    """
    Insert intermediate bags between adjacent bags differing by several vertices.

    Going from ``X_i`` to ``X_j`` the vertices of ``X_i - X_j`` are dropped
    one at a time, then those of ``X_j - X_i`` added, so every intermediate
    bag is a subset of an endpoint bag and the width is unchanged.
    """
    violations = _structure_violations(td)
    if violations:
        raise StructuralError(f"invalid decomposition: {violations[0]}")
    bags = dict(td.bags)
    edges = []
    next_idx = max(bags) + 1
    for i, j in td.tree_edges:
        drop = sorted(bags[i] - bags[j], reverse=True)
        add = sorted(bags[j] - bags[i])
        chain = [i]
        current = bags[i]
        steps = [("drop", v) for v in drop] + [("add", v) for v in add]
        for action, vertex in steps[:-1]:
            current = current - {vertex} if action == "drop" else current | {vertex}
            bags[next_idx] = current
            chain.append(next_idx)
            next_idx += 1
        chain.append(j)
        edges.extend(zip(chain, chain[1:]))
    nice = NiceTreeDecomposition(bags, edges, td.root)
    log.debug("make_nice: %d bags -> %d bags", len(td), len(nice))
    return nice


def leaves(td: TreeDecomposition) -> List[int]:
    if len(td.bags) == 1:
        return list(td.bags)
    return sorted(idx for idx in td.bags if td.tree.degree(idx) == 1)


def is_path(td: TreeDecomposition) -> bool:
    return nx.is_tree(td.tree) and all(degree <= 2 for _, degree in td.tree.degree)


def prune_subset_leaves(td: TreeDecomposition) -> NiceTreeDecomposition:
    """Remove leaf bags contained in their neighbor until none is left."""
    bags = dict(td.bags)
    tree = td.tree.copy()
    root = td.root
    changed = True
    while changed and len(bags) > 1:
        changed = False
        for leaf in sorted(idx for idx in bags if tree.degree(idx) == 1):
            (neighbor,) = tree[leaf]
            if bags[leaf] <= bags[neighbor]:
                tree.remove_node(leaf)
                del bags[leaf]
                if root == leaf:
                    root = neighbor
                changed = True
                break
    return NiceTreeDecomposition(bags, tree.edges, root)


def restrict_decomposition(td: TreeDecomposition, vertices: Iterable[int]) -> TreeDecomposition:
    """Intersect every bag with ``vertices``, a decomposition of the induced subgraph."""
    keep = frozenset(vertices)
    return type(td)(
        {idx: bag & keep for idx, bag in td.bags.items()}, td.tree_edges, td.root
    )


def _path_order(td: TreeDecomposition) -> List[int]:
    start = min(leaves(td))
    order = [start]
    previous = None
    while True:
        following = [idx for idx in td.tree[order[-1]] if idx != previous]
        if not following:
            return order
        previous = order[-1]
        order.append(following[0])


def find_removal_plan(
    td: NiceTreeDecomposition, terminals, graph: Optional[Graph] = None
) -> Optional[RemovalPlan]:
    """
    Choose a non-terminal vertex that a low-degree star-mesh can remove.

    A leaf bag whose exclusive vertex is not a terminal gives a vertex whose
    neighbors all sit in that bag.  Otherwise the tree is a path whose two
    leaves hold the terminals; walking from the first bag ``X_1`` (exclusive
    vertex ``s``) the first bag ``X_j``, ``j > 1``, strictly containing its
    successor gives the vertex ``X_j - X_{j+1}``, adjacent only inside
    ``X_j`` and ``s``.  With no such bag any non-terminal vertex of the last
    bag is taken.  Ties go to the lowest current degree, then lowest id.

    :returns: ``None`` when only terminals remain.
    :raises StructuralError: when the decomposition is not nice, or a leaf
        bag is contained in its neighbor.
    """
    if not isinstance(td, NiceTreeDecomposition):
        raise StructuralError("removal planning needs a nice decomposition", assumption="nice")
    if not td.bags:
        raise StructuralError("empty decomposition")
    terminals = set(terminals)

    def pick(candidates):
        if graph is None:
            return min(candidates)
        return min(candidates, key=lambda vertex: (degree_distinct(graph, vertex), vertex))

    if len(td.bags) == 1:
        (idx, bag), = td.bags.items()
        candidates = bag - terminals
        if not candidates:
            return None
        return RemovalPlan(pick(candidates), idx, PATH_ROOT, len(bag) - 1, None, (idx,))

    by_leaf = {}
    for leaf in leaves(td):
        (parent,) = td.tree[leaf]
        exclusive = td.bags[leaf] - td.bags[parent]
        if len(exclusive) != 1:
            raise StructuralError(
                f"leaf bag {leaf} {sorted(td.bags[leaf])} is not a strict superset "
                f"of its neighbor {parent} {sorted(td.bags[parent])}", assumption="A2"
            )
        (vertex,) = exclusive
        if vertex not in terminals:
            by_leaf[vertex] = leaf
    if by_leaf:
        vertex = pick(by_leaf)
        leaf = by_leaf[vertex]
        plan = RemovalPlan(vertex, leaf, LEAF_BAG, len(td.bags[leaf]) - 1, None, (leaf,))
        log.debug("plan %s", plan)
        return plan

    if not is_path(td):
        raise StructuralError(
            "every leaf bag's exclusive vertex is a terminal but the tree is not a path",
            assumption="two terminals",
        )
    order = _path_order(td)
    (anchor,) = td.bags[order[0]] - td.bags[order[1]]
    for pos in range(1, len(order) - 1):
        current, following = td.bags[order[pos]], td.bags[order[pos + 1]]
        if current > following:
            (vertex,) = current - following
            if vertex in terminals:
                raise StructuralError(f"path case selected terminal {vertex}", assumption="two terminals")
            plan = RemovalPlan(
                vertex, order[pos], PATH_INTERIOR, len(current), anchor, tuple(order[: pos + 1])
            )
            log.debug("plan %s", plan)
            return plan
    last = td.bags[order[-1]]
    candidates = last - terminals
    if not candidates:
        return None
    plan = RemovalPlan(
        pick(candidates), order[-1], PATH_ROOT, len(last | {anchor}) - 1, anchor, tuple(order)
    )
    log.debug("plan %s", plan)
    return plan


def update_after_removal(td: NiceTreeDecomposition, plan: RemovalPlan) -> NiceTreeDecomposition:
    """
    Drop ``plan.vertex`` from the decomposition after it was star-mesh transformed.

    The bags named by ``plan.merged_bags`` collapse into one bag holding
    their union minus the removed vertex; every edge the transformation
    added joins two vertices of that union, so they stay covered.
    """
    vertex = plan.vertex
    merged = plan.merged_bags or (plan.bag_index,)
    if plan.bag_index not in td.bags or vertex not in td.bags[plan.bag_index]:
        raise StructuralError(f"plan {plan} does not match the decomposition")
    if any(idx not in td.bags for idx in merged):
        raise StructuralError(f"plan {plan} names unknown bags")
    outside = [idx for idx, bag in td.bags.items() if vertex in bag and idx not in merged]
    if outside:
        raise StructuralError(f"vertex {vertex} also appears in bags {outside}")
    bags = dict(td.bags)
    tree = td.tree.copy()
    union = frozenset().union(*(bags[idx] for idx in merged))
    for idx in merged:
        if idx != plan.bag_index:
            tree.remove_node(idx)
            del bags[idx]
    bags[plan.bag_index] = union - {vertex}
    root = td.root if td.root in bags else plan.bag_index
    return prune_subset_leaves(NiceTreeDecomposition(bags, tree.edges, root))


def heuristic_decomposition(graph: Graph) -> TreeDecomposition:
    """Min-fill elimination decomposition; its width bounds the treewidth from above."""
    nxg = nx.Graph(to_networkx(graph))
    nxg.remove_edges_from(list(nx.selfloop_edges(nxg)))
    if nxg.number_of_nodes() == 0:
        return TreeDecomposition({1: ()})
    _, decomposition = treewidth_min_fill_in(nxg)
    ordered = sorted(decomposition.nodes, key=sorted)
    index = {bag: idx for idx, bag in enumerate(ordered, 1)}
    td = TreeDecomposition(
        {idx: bag for bag, idx in index.items()},
        [(index[a], index[b]) for a, b in decomposition.edges],
    )
    log.debug("min-fill decomposition: %d bags, width %d", len(td), width(td))
    return td


def _components(nxg, removed):
    rest = nxg.subgraph(set(nxg.nodes) - set(removed))
    return sorted((set(c) for c in nx.connected_components(rest)), key=lambda c: (-len(c), min(c)))


def _split(nxg, separator):
    components = _components(nxg, separator)
    total = sum(len(c) for c in components)
    side1, side2 = set(), set()
    for component in components:
        if 3 * len(side1) < total:
            side1 |= component
        else:
            side2 |= component
    return side1, side2


def split_components(graph: Graph, separator) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """Group the components of ``G - separator`` into two sides, largest first."""
    side1, side2 = _split(nx.Graph(to_networkx(graph)), set(separator))
    return frozenset(side1), frozenset(side2)


def balanced_separator(graph: Graph, td: TreeDecomposition):
    """
    Return ``(S, V1, V2)``: a separator taken from a bag and the two sides.

    Walks the tree from the root towards the branch holding the largest
    component of ``G - X_t`` until no component exceeds half the vertices,
    splits the components greedily, then drops separator vertices that are
    not needed for the ``2n/3`` balance.

    :raises StructuralError: when ``n <= 2w + 2``.
    """
    n = len(graph)
    w = width(td)
    if n <= 2 * w + 2:
        raise StructuralError(f"graph too small for a balanced separator: n={n}, w={w}")
    nxg = nx.Graph(to_networkx(graph))
    limit = Fraction(2 * n, 3)

    def balanced(separator):
        side1, side2 = _split(nxg, separator)
        return max(len(side1), len(side2)) <= limit

    current = td.root if td.root is not None else min(td.bags)
    visited = set()
    while True:
        visited.add(current)
        components = _components(nxg, td.bags[current])
        if not components or 2 * len(components[0]) <= n:
            break
        heavy = components[0]
        others = td.tree.copy()
        others.remove_node(current)
        step = None
        for neighbor in td.neighbors(current):
            branch = nx.node_connected_component(others, neighbor)
            if any(heavy & td.bags[idx] for idx in branch):
                step = neighbor
                break
        if step is None or step in visited:
            fallback = [idx for idx in sorted(td.bags) if balanced(td.bags[idx])]
            if not fallback:
                raise StructuralError("no bag of the decomposition is a balanced separator")
            current = fallback[0]
            break
        current = step

    separator = set(td.bags[current])
    if not balanced(separator):
        raise StructuralError(f"bag {current} is not a balanced separator")
    for vertex in sorted(separator):
        if balanced(separator - {vertex}):
            separator.discard(vertex)
    side1, side2 = _split(nxg, separator)
    log.debug("separator %s from bag %d: |V1|=%d |V2|=%d", sorted(separator), current, len(side1), len(side2))
    return frozenset(separator), frozenset(side1), frozenset(side2)


def parse_decomposition(lines: Iterable[str], source: str = "<input>") -> TreeDecomposition:
    header = None
    bags = {}
    edges = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if header is not None:
                    raise ParseError("duplicate 's td' line", lineno, source)
                if len(parts) != 5 or parts[1] != "td":
                    raise ParseError("expected 's td <bags> <max-bag-size> <vertices>'", lineno, source)
                header = tuple(int(token) for token in parts[2:])
            elif parts[0] == "b":
                if header is None:
                    raise ParseError("bag line before 's td' line", lineno, source)
                if len(parts) < 2:
                    raise ParseError("bag line without an id", lineno, source)
                idx = int(parts[1])
                if idx in bags:
                    raise ParseError(f"duplicate bag id {idx}", lineno, source)
                bags[idx] = frozenset(int(token) for token in parts[2:])
            else:
                if header is None:
                    raise ParseError("tree edge before 's td' line", lineno, source)
                if len(parts) != 2:
                    raise ParseError("expected '<bag-id> <bag-id>'", lineno, source)
                edges.append((int(parts[0]), int(parts[1]), lineno))
        except ParseError:
            raise
        except ValueError:
            raise ParseError(f"expected integers in {line!r}", lineno, source) from None
    if header is None:
        raise ParseError("missing 's td' line", source=source)
    declared_bags, declared_size, _ = header
    if declared_bags != len(bags):
        log.warning("%s: declares %d bags, found %d", source, declared_bags, len(bags))
    if bags and declared_size != max(len(bag) for bag in bags.values()):
        log.warning("%s: declares max bag size %d, found %d",
                    source, declared_size, max(len(bag) for bag in bags.values()))
    seen = set()
    tree_edges = []
    for i, j, lineno in edges:
        if i not in bags or j not in bags:
            raise ParseError(f"tree edge ({i}, {j}) names an unknown bag", lineno, source)
        if frozenset((i, j)) in seen:
            log.warning("%s:%d: duplicate tree edge (%d, %d)", source, lineno, i, j)
            continue
        seen.add(frozenset((i, j)))
        tree_edges.append((i, j))
    return TreeDecomposition(bags, tree_edges)


def read_decomposition(path) -> TreeDecomposition:
    with open(path, encoding="utf-8") as fin:
        return parse_decomposition(fin, source=os.fspath(path))


def format_decomposition(td: TreeDecomposition, vertex_count: int) -> str:
    """Serialize in PACE ``.td`` format, renumbering bags ``1..N``."""
    number = {idx: pos for pos, idx in enumerate(sorted(td.bags), 1)}
    max_size = max((len(bag) for bag in td.bags.values()), default=0)
    lines = [f"s td {len(td.bags)} {max_size} {vertex_count}"]
    for idx in sorted(td.bags):
        lines.append(" ".join(["b", str(number[idx])] + [str(v) for v in sorted(td.bags[idx])]))
    for i, j in td.tree_edges:
        lines.append(f"{number[i]} {number[j]}")
    return "\n".join(lines) + "\n"


def write_decomposition(td: TreeDecomposition, path, vertex_count: int) -> None:
    with open(path, "w", encoding="utf-8") as fout:
        fout.write(format_decomposition(td, vertex_count))
