"""
Two-terminal undirected multigraph with a pair of arrival functions per edge.

Each :class:`EdgeRecord` stores ``forward`` (travel from ``u`` to ``v``) and
``backward`` (from ``v`` to ``u``).  One-way travel is expressed with the
infinite function rather than by leaving the edge out.  Self-loops and
parallel edges are representable; they appear while a graph is reduced.

Graph file format::

    c any comment
    p tdg <vertex-count> <s> <d>
    e <u> <v> <forward> <backward>

Vertices are the integers ``1..vertex-count``; functions are serialized with
:func:`tdsp_reduce.pwl.format_function`.
"""
# std imports
import os
import logging
import collections
from typing import Dict, List, Tuple, Iterable, Optional, NamedTuple

# 3rd party
import networkx as nx

# local
from tdsp_reduce import pwl
from tdsp_reduce.errors import ParseError, StructuralError

log = logging.getLogger(__name__)


class EdgeRecord(NamedTuple):
    key: int
    u: int
    v: int
    forward: pwl.PwlFunction
    backward: pwl.PwlFunction

    @property
    def endpoints(self) -> frozenset:
        return frozenset((self.u, self.v))

    @property
    def is_self_loop(self) -> bool:
        return self.u == self.v

    def departing(self, vertex) -> pwl.PwlFunction:
        if vertex == self.u:
            return self.forward
        if vertex == self.v:
            return self.backward
        raise StructuralError(f"vertex {vertex} is not an endpoint of edge {self.key}")

    def other(self, vertex) -> int:
        return self.v if vertex == self.u else self.u


class GraphViolation(NamedTuple):
    edge_key: int
    tail: int
    head: int
    violation: pwl.FifoViolation

    def __str__(self):
        return f"edge {self.edge_key} ({self.tail}->{self.head}): {self.violation}"


class Graph:
    """
    Mutable two-terminal multigraph.

    Edge keys come from a counter that only grows, so a key names the same
    edge for the lifetime of the graph even after the edge is removed.
    """

    def __init__(self, vertices: Iterable[int] = (), terminals: Optional[Tuple[int, int]] = None):
        self._incident: Dict[int, set] = {}
        self.edges: Dict[int, EdgeRecord] = {}
        self._next_key = 1
        for vertex in vertices:
            self.add_vertex(vertex)
        self.terminals = None
        if terminals is not None:
            self.set_terminals(*terminals)

    def __repr__(self):
        return (
            f"Graph(n={len(self._incident)}, m={len(self.edges)}, terminals={self.terminals})"
        )

    def __len__(self):
        return len(self._incident)

    def __contains__(self, vertex):
        return vertex in self._incident

    @property
    def vertices(self) -> List[int]:
        return sorted(self._incident)

    def set_terminals(self, s: int, d: int) -> None:
        for vertex in (s, d):
            if vertex not in self._incident:
                raise StructuralError(f"terminal {vertex} is not a vertex of the graph")
        self.terminals = (s, d)

    def add_vertex(self, vertex: int) -> None:
        self._incident.setdefault(vertex, set())

    def add_edge(self, u: int, v: int, forward: pwl.PwlFunction, backward: pwl.PwlFunction) -> int:
        for vertex in (u, v):
            if vertex not in self._incident:
                raise StructuralError(f"edge endpoint {vertex} is not a vertex of the graph")
        key = self._next_key
        self._next_key += 1
        self.edges[key] = EdgeRecord(key, u, v, forward, backward)
        self._incident[u].add(key)
        self._incident[v].add(key)
        return key

    def remove_edge(self, key: int) -> EdgeRecord:
        try:
            edge = self.edges.pop(key)
        except KeyError:
            raise StructuralError(f"no edge with key {key}") from None
        self._incident[edge.u].discard(key)
        self._incident[edge.v].discard(key)
        return edge

    def remove_vertex(self, vertex: int) -> List[EdgeRecord]:
        """Remove ``vertex`` and every incident edge, returning those edges."""
        removed = [self.remove_edge(key) for key in self.incident(vertex)]
        del self._incident[vertex]
        return removed

    def incident(self, vertex: int) -> List[int]:
        try:
            return sorted(self._incident[vertex])
        except KeyError:
            raise StructuralError(f"unknown vertex {vertex}") from None

    def neighbors(self, vertex: int) -> List[int]:
        return sorted(
            {self.edges[key].other(vertex) for key in self.incident(vertex)} - {vertex}
        )

    def edges_between(self, u: int, v: int) -> List[int]:
        return [key for key in self.incident(u) if self.edges[key].other(u) == v]

    def arrival(self, key: int, from_vertex: int) -> pwl.PwlFunction:
        return self.edges[key].departing(from_vertex)

    def copy(self) -> "Graph":
        clone = Graph()
        clone._incident = {vertex: set(keys) for vertex, keys in self._incident.items()}
        clone.edges = dict(self.edges)
        clone._next_key = self._next_key
        clone.terminals = self.terminals
        return clone

    def with_terminals(self, s: int, d: int) -> "Graph":
        clone = self.copy()
        clone.set_terminals(s, d)
        return clone


def degree_distinct(graph: Graph, vertex: int) -> int:
    # self-loops and multiplicity do not count
    return len(graph.neighbors(vertex))


def parallel_groups(graph: Graph) -> List[Tuple[int, ...]]:
    """Return each maximal class of two or more edges sharing both endpoints."""
    classes = collections.defaultdict(list)
    for key in sorted(graph.edges):
        edge = graph.edges[key]
        if not edge.is_self_loop:
            classes[edge.endpoints].append(key)
    return sorted(tuple(keys) for keys in classes.values() if len(keys) > 1)


def induced_subgraph(graph: Graph, vertices: Iterable[int]) -> Graph:
    """
    Return the subgraph on ``vertices`` with every edge between them.

    Edge keys and functions are kept.  Terminals carry over only when both
    are inside ``vertices``.
    """
    vertices = set(vertices)
    missing = vertices - set(graph.vertices)
    if missing:
        raise StructuralError(f"vertices {sorted(missing)} are not in the graph")
    sub = Graph(sorted(vertices))
    for key in sorted(graph.edges):
        edge = graph.edges[key]
        if edge.u in vertices and edge.v in vertices:
            sub.edges[key] = edge
            sub._incident[edge.u].add(key)
            sub._incident[edge.v].add(key)
    sub._next_key = graph._next_key
    if graph.terminals and set(graph.terminals) <= vertices:
        sub.terminals = graph.terminals
    return sub


def total_pieces(graph: Graph) -> int:
    """K: linear pieces over both directions of every edge."""
    return sum(
        pwl.pieces_of(edge.forward) + pwl.pieces_of(edge.backward)
        for edge in graph.edges.values()
    )


def validate(graph: Graph) -> List[GraphViolation]:
    violations = []
    for key in sorted(graph.edges):
        edge = graph.edges[key]
        for tail, head, function in ((edge.u, edge.v, edge.forward), (edge.v, edge.u, edge.backward)):
            violations.extend(
                GraphViolation(key, tail, head, violation)
                for violation in pwl.validate_fifo(function)
            )
    return violations


def to_networkx(graph: Graph) -> nx.MultiGraph:
    """Topology only, as a networkx multigraph keyed by edge key."""
    nxg = nx.MultiGraph()
    nxg.add_nodes_from(graph.vertices)
    for key, edge in sorted(graph.edges.items()):
        nxg.add_edge(edge.u, edge.v, key=key)
    return nxg


def is_connected_pair(graph: Graph, u: int, v: int) -> bool:
    return nx.has_path(to_networkx(graph), u, v)


def parse_graph(lines: Iterable[str], source: str = "<input>") -> Graph:
    graph = None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if graph is not None:
                raise ParseError("duplicate 'p' header", lineno, source)
            if len(parts) != 5 or parts[1] != "tdg":
                raise ParseError("expected 'p tdg <vertex-count> <s> <d>'", lineno, source)
            n, s, d = _ints(parts[2:], lineno, source)
            if n < 1:
                raise ParseError(f"vertex count must be positive, got {n}", lineno, source)
            try:
                graph = Graph(range(1, n + 1), terminals=(s, d))
            except StructuralError as err:
                raise ParseError(str(err), lineno, source) from err
        elif parts[0] == "e":
            if graph is None:
                raise ParseError("edge record before 'p' header", lineno, source)
            if len(parts) != 5:
                raise ParseError("expected 'e <u> <v> <forward> <backward>'", lineno, source)
            u, v = _ints(parts[1:3], lineno, source)
            try:
                forward = pwl.parse_function(parts[3])
                backward = pwl.parse_function(parts[4])
                graph.add_edge(u, v, forward, backward)
            except StructuralError as err:
                raise ParseError(str(err), lineno, source) from err
        else:
            raise ParseError(f"unknown record type {parts[0]!r}", lineno, source)
    if graph is None:
        raise ParseError("missing 'p tdg' header", source=source)
    log.debug("parsed %s: %r", source, graph)
    return graph


def _ints(tokens, lineno, source):
    try:
        return [int(token) for token in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno, source) from None


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fin:
        return parse_graph(fin, source=os.fspath(path))


def format_graph(graph: Graph, comment: Optional[str] = None) -> str:
    """
    Serialize ``graph``; vertices must be the integers ``1..n``.

    Edges are written in key order.  Parsing the result gives back the same
    topology, terminals and functions, with keys renumbered from 1.
    """
    if graph.vertices != list(range(1, len(graph) + 1)):
        raise StructuralError("only graphs on vertices 1..n can be written")
    s, d = graph.terminals or (1, 1)
    lines = [f"c {comment}"] if comment else []
    lines.append(f"p tdg {len(graph)} {s} {d}")
    for key in sorted(graph.edges):
        edge = graph.edges[key]
        lines.append(
            f"e {edge.u} {edge.v} {pwl.format_function(edge.forward)} "
            f"{pwl.format_function(edge.backward)}"
        )
    return "\n".join(lines) + "\n"


def write_graph(graph: Graph, path, comment: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fout:
        fout.write(format_graph(graph, comment))
