"""
Arrival-function preserving graph reductions.

The primitive transformations delete self-loops, pendant vertices, merge
parallel edges with the pointwise minimum, and star-mesh transform a vertex:
the vertex is deleted and each pair of its neighbors is joined by an edge
carrying the composition of the two edges through it.  None of them changes
the end-to-end arrival function between the terminals.

:func:`reduce_to_terminals` drives these with a nice tree decomposition of
width ``w`` so that every star-mesh has degree at most ``w + 1``, ending with
the single edge joining ``s`` and ``d``.  :func:`contract_to_separator_graph`
and :func:`reduce_by_separators` compute the same result by divide and
conquer over balanced separators.
"""
# std imports
import math
import time
import logging
import itertools
import collections
from typing import Dict, List, Tuple, Callable, Optional, Sequence
from dataclasses import field, dataclass

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import (Graph,
                               total_pieces,
                               degree_distinct,
                               parallel_groups,
                               induced_subgraph,
                               is_connected_pair)
from tdsp_reduce.errors import StructuralError
from tdsp_reduce.treedecomp import (TreeDecomposition,
                                    width,
                                    as_nice,
                                    make_nice,
                                    check_nice,
                                    split_components,
                                    find_removal_plan,
                                    balanced_separator,
                                    prune_subset_leaves,
                                    update_after_removal,
                                    restrict_decomposition,
                                    validate_decomposition,
                                    heuristic_decomposition)

log = logging.getLogger(__name__)

SELF_LOOP = "self_loop"
PENDANT = "pendant"
SERIES = "series"
PARALLEL = "parallel"
STAR_MESH = "star_mesh"
SEPARATOR_CONTRACTION = "separator_contraction"
STEP_KINDS = (SELF_LOOP, PENDANT, SERIES, PARALLEL, STAR_MESH, SEPARATOR_CONTRACTION)

OnStep = Callable[[Graph, "ReductionStep"], None]
PairSolver = Callable[[Graph, int, int], Tuple[pwl.PwlFunction, pwl.PwlFunction]]


@dataclass(frozen=True)
class ReductionStep:
    """
    One applied transformation.

    ``removed`` holds a vertex id for vertex eliminations (pendant, series,
    star-mesh) and edge keys otherwise.  Breakpoint counts are the largest
    over both directions of the removed and of the created edges.
    """

    kind: str
    removed: Tuple[int, ...]
    created: Tuple[int, ...] = ()
    degree: Optional[int] = None
    breakpoints_before: int = 0
    breakpoints_after: int = 0

    @property
    def weight(self) -> int:
        # a k-edge class merged at once counts as k - 1 pairwise reductions
        if self.kind == PARALLEL:
            return len(self.removed) - 1
        return 1

    def __str__(self):
        text = f"{self.kind} removed={','.join(map(str, self.removed))}"
        if self.created:
            text += f" created={','.join(map(str, self.created))}"
        if self.degree is not None:
            text += f" degree={self.degree}"
        return f"{text} breakpoints={self.breakpoints_before}->{self.breakpoints_after}"


@dataclass
class ReductionTrace:
    n: int = 0
    width: Optional[int] = None
    total_pieces: int = 0
    initial_parallel_excess: int = 0
    elapsed: float = 0.0
    steps: List[ReductionStep] = field(default_factory=list)

    def record(self, step: ReductionStep) -> None:
        log.debug("%s", step)
        self.steps.append(step)

    @property
    def counts(self) -> Dict[str, int]:
        counts = dict.fromkeys(STEP_KINDS, 0)
        for step in self.steps:
            counts[step.kind] += step.weight
        return counts

    @property
    def star_mesh_count(self) -> int:
        return self.counts[STAR_MESH]

    @property
    def parallel_count(self) -> int:
        return self.counts[PARALLEL]

    @property
    def degree_histogram(self) -> Dict[int, int]:
        return dict(sorted(collections.Counter(
            step.degree for step in self.steps if step.kind == STAR_MESH
        ).items()))

    @property
    def max_star_degree(self) -> int:
        return max(self.degree_histogram, default=0)

    @property
    def max_breakpoints(self) -> int:
        return max((step.breakpoints_after for step in self.steps), default=0)

    def check_budgets(self) -> None:
        """Assert the star-mesh count, degree and parallel-reduction budgets."""
        assert self.width is not None, ("budgets need the decomposition width",)
        stars = max(self.n - 2, 0)
        assert self.star_mesh_count == stars, (
            "star-mesh count", self.star_mesh_count, "expected", stars)
        assert self.max_star_degree <= self.width + 1, (
            "star degree", self.max_star_degree, "exceeds width + 1", self.width + 1)
        budget = stars * math.comb(self.width + 1, 2) + self.initial_parallel_excess
        assert self.parallel_count <= budget, (
            "parallel reductions", self.parallel_count, "exceed budget", budget)


def _max_breakpoints(edges) -> int:
    return max(
        (max(pwl.breakpoint_count(edge.forward), pwl.breakpoint_count(edge.backward))
         for edge in edges),
        default=0,
    )


def _is_terminal(graph: Graph, vertex: int) -> bool:
    return graph.terminals is not None and vertex in graph.terminals


def _delete_self_loop(graph: Graph, key: int) -> ReductionStep:
    if key not in graph.edges:
        raise StructuralError(f"no edge with key {key}")
    if not graph.edges[key].is_self_loop:
        raise StructuralError(f"edge {key} is not a self-loop")
    edge = graph.remove_edge(key)
    return ReductionStep(SELF_LOOP, (key,), breakpoints_before=_max_breakpoints([edge]))


def delete_self_loop(graph: Graph, key: int) -> None:
    """Remove a self-loop; under FIFO a loop never shortens a route."""
    _delete_self_loop(graph, key)


def _pendant(graph: Graph, vertex: int) -> ReductionStep:
    if _is_terminal(graph, vertex):
        raise StructuralError(f"cannot remove terminal {vertex}")
    degree = degree_distinct(graph, vertex)
    if degree != 1:
        raise StructuralError(f"vertex {vertex} has degree {degree}, not 1")
    removed = graph.remove_vertex(vertex)
    return ReductionStep(PENDANT, (vertex,), breakpoints_before=_max_breakpoints(removed))


def pendant_reduce(graph: Graph, vertex: int) -> None:
    """Remove a non-terminal vertex with a single neighbor, and its edges."""
    _pendant(graph, vertex)


def _parallel(graph: Graph, group: Sequence[int]) -> Tuple[int, ReductionStep]:
    keys = sorted(set(group))
    if len(keys) < 2:
        raise StructuralError(f"parallel reduction needs two or more edges, got {keys}")
    missing = [key for key in keys if key not in graph.edges]
    if missing:
        raise StructuralError(f"no edges with keys {missing}")
    first = graph.edges[keys[0]]
    if first.is_self_loop or any(graph.edges[key].endpoints != first.endpoints for key in keys):
        raise StructuralError(f"edges {keys} are not parallel")
    u, v = first.u, first.v
    forward, backward = pwl.infinity(), pwl.infinity()
    for key in keys:
        forward = pwl.minimum(forward, graph.arrival(key, u))
        backward = pwl.minimum(backward, graph.arrival(key, v))
    removed = [graph.remove_edge(key) for key in keys]
    new_key = graph.add_edge(u, v, forward, backward)
    return new_key, ReductionStep(
        PARALLEL, tuple(keys), (new_key,),
        breakpoints_before=_max_breakpoints(removed),
        breakpoints_after=_max_breakpoints([graph.edges[new_key]]),
    )


def parallel_reduce(graph: Graph, group: Sequence[int]) -> int:
    """Replace a class of parallel edges by one edge taking the minimum per direction."""
    key, _ = _parallel(graph, group)
    return key


def _mesh(graph: Graph, center: int, kind: str) -> ReductionStep:
    if _is_terminal(graph, center):
        raise StructuralError(f"cannot remove terminal {center}")
    incident = graph.incident(center)
    by_neighbor = {}
    for key in incident:
        edge = graph.edges[key]
        if edge.is_self_loop:
            raise StructuralError(f"self-loop {key} at vertex {center}", assumption="A1")
        neighbor = edge.other(center)
        if neighbor in by_neighbor:
            raise StructuralError(
                f"parallel edges {by_neighbor[neighbor]} and {key} at vertex {center}",
                assumption="A1",
            )
        by_neighbor[neighbor] = key
    neighbors = sorted(by_neighbor)
    created = []
    for a, b in itertools.combinations(neighbors, 2):
        ka, kb = by_neighbor[a], by_neighbor[b]
        forward = pwl.compose(graph.arrival(kb, center), graph.arrival(ka, a))
        backward = pwl.compose(graph.arrival(ka, center), graph.arrival(kb, b))
        created.append(graph.add_edge(a, b, forward, backward))
    removed = graph.remove_vertex(center)
    return ReductionStep(
        kind, (center,), tuple(created), degree=len(neighbors),
        breakpoints_before=_max_breakpoints(removed),
        breakpoints_after=_max_breakpoints(graph.edges[key] for key in created),
    )


def star_mesh(graph: Graph, center: int) -> List[int]:
    """
    Delete ``center`` and join every pair of its neighbors.

    For neighbors ``a`` and ``b`` the new edge carries ``A_cb o A_ac`` from
    ``a`` to ``b`` and ``A_ca o A_bc`` back.  Existing edges between the
    neighbors are kept, leaving parallel pairs for :func:`parallel_reduce`.

    :returns: keys of the created edges.
    :raises StructuralError: for a terminal, or when ``center`` has a
        self-loop or parallel edges.
    """
    return list(_mesh(graph, center, STAR_MESH).created)


def series_reduce(graph: Graph, vertex: int) -> int:
    """Replace a degree-two non-terminal vertex by one composed edge."""
    degree = degree_distinct(graph, vertex)
    if degree != 2:
        raise StructuralError(f"vertex {vertex} has degree {degree}, not 2")
    (key,) = _mesh(graph, vertex, SERIES).created
    return key


def _apply(graph, trace, on_step, step):
    trace.record(step)
    if on_step is not None:
        on_step(graph, step)


def _clean(graph: Graph, trace: ReductionTrace, on_step: Optional[OnStep]) -> int:
    """Delete self-loops and merge parallel classes; returns parallel reductions done."""
    for key in sorted(graph.edges):
        if graph.edges[key].is_self_loop:
            _apply(graph, trace, on_step, _delete_self_loop(graph, key))
    merged = 0
    for group in parallel_groups(graph):
        _, step = _parallel(graph, group)
        merged += step.weight
        _apply(graph, trace, on_step, step)
    return merged


def _terminal_functions(graph: Graph) -> Tuple[pwl.PwlFunction, pwl.PwlFunction]:
    s, d = graph.terminals
    keys = graph.edges_between(s, d)
    if not keys:
        return pwl.infinity(), pwl.infinity()
    (key,) = keys
    return graph.arrival(key, s), graph.arrival(key, d)


def _require_terminals(graph: Graph) -> Tuple[int, int]:
    if graph.terminals is None:
        raise StructuralError("graph has no terminals")
    s, d = graph.terminals
    if s == d:
        raise StructuralError(f"terminals must differ, both are {s}")
    return s, d


def reduce_to_terminals(
    graph: Graph, td: TreeDecomposition, on_step: Optional[OnStep] = None
) -> Tuple[pwl.PwlFunction, pwl.PwlFunction, ReductionTrace]:
    """
    Reduce a copy of ``graph`` to the single edge between its terminals.

    Each round deletes self-loops, merges parallel edges, prunes leaf bags
    contained in their neighbor, then star-mesh transforms the vertex named
    by :func:`find_removal_plan` and updates the decomposition.  A
    decomposition that is valid but not nice is made nice first.

    :param on_step: called as ``on_step(graph, step)`` after every
        transformation, with the working graph.
    :returns: ``(A_sd, A_ds, trace)``; both functions are infinite when the
        terminals are disconnected.
    :raises StructuralError: when ``td`` is not a valid decomposition of
        ``graph``.
    """
    s, d = _require_terminals(graph)
    violations = validate_decomposition(graph, td)
    if violations:
        raise StructuralError(f"invalid decomposition: {violations[0]}")
    nice = as_nice(td) if not check_nice(td) else make_nice(td)
    work = graph.copy()
    trace = ReductionTrace(n=len(graph), width=width(nice), total_pieces=total_pieces(graph))
    log.info("reducing n=%d width=%d K=%d", trace.n, trace.width, trace.total_pieces)
    if not is_connected_pair(graph, s, d):
        log.warning("terminals %d and %d are disconnected, both functions are inf", s, d)
    start = time.perf_counter()

    trace.initial_parallel_excess = _clean(work, trace, on_step)
    while True:
        nice = prune_subset_leaves(nice)
        plan = find_removal_plan(nice, (s, d), work)
        if plan is None:
            break
        step = _mesh(work, plan.vertex, STAR_MESH)
        assert step.degree <= plan.expected_degree_bound, (
            "star degree", step.degree, "exceeds plan bound", plan)
        _apply(work, trace, on_step, step)
        nice = update_after_removal(nice, plan)
        _clean(work, trace, on_step)

    assert set(work.vertices) == {s, d}, ("vertices left after reduction", work.vertices)
    trace.elapsed = time.perf_counter() - start
    trace.check_budgets()
    A_sd, A_ds = _terminal_functions(work)
    log.info("reduced n=%d in %.3fs: %d star-mesh, %d parallel, %d breakpoints",
             trace.n, trace.elapsed, trace.star_mesh_count, trace.parallel_count,
             pwl.breakpoint_count(A_sd))
    return A_sd, A_ds, trace


def reduce_series_parallel(graph: Graph) -> ReductionTrace:
    """
    Apply self-loop, pendant, series and parallel rules in place until none applies.

    No decomposition is needed.  ``graph`` is two-terminal series-parallel
    exactly when it ends as the single edge between its terminals.
    """
    trace = ReductionTrace(n=len(graph), total_pieces=total_pieces(graph))
    trace.initial_parallel_excess = _clean(graph, trace, None)
    changed = True
    while changed:
        changed = False
        for vertex in graph.vertices:
            if _is_terminal(graph, vertex):
                continue
            degree = degree_distinct(graph, vertex)
            if degree == 1:
                trace.record(_pendant(graph, vertex))
            elif degree == 2:
                trace.record(_mesh(graph, vertex, SERIES))
            else:
                continue
            _clean(graph, trace, None)
            changed = True
            break
    return trace


def _reduce_pair(side: Graph, u: int, v: int) -> Tuple[pwl.PwlFunction, pwl.PwlFunction]:
    pair = side.with_terminals(u, v)
    A_uv, A_vu, _ = reduce_to_terminals(pair, heuristic_decomposition(pair))
    return A_uv, A_vu


def contract_to_separator_graph(
    graph: Graph,
    separator,
    s: Optional[int] = None,
    d: Optional[int] = None,
    sides=None,
    solver: Optional[PairSolver] = None,
) -> Graph:
    """
    Build the graph on ``separator`` plus the terminals that keeps ``A_(s,d)``.

    For each side ``V_i`` of ``G - S`` and each pair of vertices in
    ``S`` plus the terminals lying in ``V_i``, one edge carries the arrival
    functions of ``G[V_i + S]`` between them, infinite when unreachable.

    :param sides: the two vertex sets of ``G - S``; by default the
        components are grouped with
        :func:`~tdsp_reduce.treedecomp.split_components`.
    :param solver: ``solver(side_graph, u, v) -> (A_uv, A_vu)``, by default
        :func:`reduce_to_terminals` with a min-fill decomposition.
    :raises StructuralError: when ``separator`` does not separate the sides.
    """
    if s is None or d is None:
        s, d = _require_terminals(graph)
    separator = frozenset(separator)
    vertices = frozenset(graph.vertices)
    if not separator <= vertices:
        raise StructuralError(f"separator vertices {sorted(separator - vertices)} are not in the graph")
    if sides is None:
        sides = split_components(graph, separator)
    side1, side2 = (frozenset(side) for side in sides)
    if side1 & side2 or (side1 | side2) != vertices - separator:
        raise StructuralError("sides do not partition the vertices outside the separator")
    for edge in graph.edges.values():
        if (edge.u in side1 and edge.v in side2) or (edge.u in side2 and edge.v in side1):
            raise StructuralError(
                f"edge {edge.key} ({edge.u}, {edge.v}) crosses the separator {sorted(separator)}")
    solver = solver or _reduce_pair

    kept = separator | {s, d}
    contracted = Graph(sorted(kept), terminals=(s, d))
    for side in (side1, side2):
        sub = induced_subgraph(graph, side | separator)
        sub.terminals = None
        ends = sorted(separator | ({s, d} & side))
        for u, v in itertools.combinations(ends, 2):
            A_uv, A_vu = solver(sub, u, v)
            contracted.add_edge(u, v, A_uv, A_vu)
    log.debug("separator graph on %s: %d edges", sorted(kept), len(contracted.edges))
    return contracted


def reduce_by_separators(
    graph: Graph, td: TreeDecomposition
) -> Tuple[pwl.PwlFunction, pwl.PwlFunction, ReductionTrace]:
    """
    Divide and conquer over balanced separators.

    Graphs with at most ``2w + 2`` vertices are reduced directly.  Larger
    ones are contracted to their separator graph, whose side functions come
    from the same recursion on each induced side with ``td`` restricted to
    it, and the separator graph is then reduced.
    """
    s, d = _require_terminals(graph)
    w = width(td)
    if len(graph) <= 2 * w + 2:
        return reduce_to_terminals(graph, td)
    separator, side1, side2 = balanced_separator(graph, td)
    if not side1 or not side2:
        return reduce_to_terminals(graph, td)

    def solver(side, u, v):
        pair = side.with_terminals(u, v)
        A_uv, A_vu, _ = reduce_by_separators(pair, restrict_decomposition(td, pair.vertices))
        return A_uv, A_vu

    start = time.perf_counter()
    contracted = contract_to_separator_graph(graph, separator, s, d, (side1, side2), solver)
    A_sd, A_ds, inner = reduce_to_terminals(contracted, heuristic_decomposition(contracted))
    trace = ReductionTrace(n=len(graph), width=w, total_pieces=total_pieces(graph))
    trace.record(ReductionStep(
        SEPARATOR_CONTRACTION,
        tuple(sorted((side1 | side2) - {s, d})),
        tuple(sorted(contracted.edges)),
        breakpoints_after=_max_breakpoints(contracted.edges.values()),
    ))
    trace.steps.extend(inner.steps)
    trace.elapsed = time.perf_counter() - start
    return A_sd, A_ds, trace


@dataclass
class Claim1Report:
    separator: Tuple[int, ...]
    side_sizes: Tuple[int, int]
    original: pwl.PwlFunction
    contracted: pwl.PwlFunction

    @property
    def equal(self) -> bool:
        return self.original == self.contracted

    @property
    def breakpoints(self) -> Tuple[int, int]:
        return pwl.breakpoint_count(self.original), pwl.breakpoint_count(self.contracted)


def claim1_check(
    graph: Graph, td: TreeDecomposition, mutate: Optional[Callable[[Graph], None]] = None
) -> Claim1Report:
    """
    Compare ``A_(s,d)`` of ``graph`` with that of its separator graph.

    :param mutate: applied to the separator graph before it is reduced,
        for fault injection.
    """
    _require_terminals(graph)
    separator, side1, side2 = balanced_separator(graph, td)
    contracted = contract_to_separator_graph(graph, separator, sides=(side1, side2))
    if mutate is not None:
        mutate(contracted)
    original, _, _ = reduce_to_terminals(graph, td)
    reduced, _, _ = reduce_to_terminals(contracted, heuristic_decomposition(contracted))
    return Claim1Report(tuple(sorted(separator)), (len(side1), len(side2)), original, reduced)


def format_trace(trace: ReductionTrace) -> str:
    return "".join(f"{step}\n" for step in trace.steps)


def trace_summary(trace: ReductionTrace) -> Dict[str, object]:
    """Key-value statistics of a trace, in display order."""
    counts = trace.counts
    return {
        "n": trace.n,
        "width": trace.width,
        "K": trace.total_pieces,
        "steps": len(trace.steps),
        **{f"{kind}_count": counts[kind] for kind in STEP_KINDS},
        "initial_parallel_excess": trace.initial_parallel_excess,
        "max_star_degree": trace.max_star_degree,
        "star_degrees": " ".join(f"{k}:{v}" for k, v in trace.degree_histogram.items()),
        "max_breakpoints": trace.max_breakpoints,
    }
