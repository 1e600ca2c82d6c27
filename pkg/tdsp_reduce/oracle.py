"""
Slow, independent arrival computations used to check the reduction engine.

:func:`td_dijkstra` answers one departure time exactly by label setting, which
is valid because every edge is FIFO.  :func:`enumerate_paths_arrival` builds
the whole end-to-end function as the minimum over every simple path, so it
is only offered for small graphs.
"""
# std imports
import heapq
import random
import logging
import itertools
from fractions import Fraction
from typing import Dict, List, Tuple, Iterable, Optional, NamedTuple
from dataclasses import field, dataclass

# 3rd party
import networkx as nx

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import Graph, to_networkx
from tdsp_reduce.errors import (DomainError,
                                SizeGuardError,
                                StructuralError,
                                FifoViolationError,
                                VerificationError)

log = logging.getLogger(__name__)

MAX_ENUMERATION_VERTICES = 12
DEFAULT_RANDOM_TIMES = 5


class OracleResult(NamedTuple):
    departure: Fraction
    arrivals: Dict[int, object]


class Mismatch(NamedTuple):
    t: Fraction
    expected: object
    got: object

    def __str__(self):
        return f"t={self.t}: oracle {self.expected}, function {self.got}"


@dataclass
class CrosscheckReport:
    times: List[Fraction] = field(default_factory=list)
    mismatches: List[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def td_dijkstra(graph: Graph, source: int, t0) -> Dict[int, object]:
    """
    Earliest arrival at every vertex when leaving ``source`` at ``t0``.

    Unreachable vertices map to :data:`~tdsp_reduce.pwl.INF`.  Ties in the
    queue are broken by vertex id.

    :raises FifoViolationError: when an edge is seen arriving before it departs.
    """
    if t0 < 0:
        raise DomainError(f"departure time must be >= 0, got {t0}")
    if source not in graph:
        raise StructuralError(f"unknown vertex {source}")
    t0 = Fraction(t0)
    arrival = dict.fromkeys(graph.vertices, pwl.INF)
    arrival[source] = t0
    heap = [(t0, source)]
    settled = set()
    while heap:
        t, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        for key in graph.incident(u):
            edge = graph.edges[key]
            if edge.is_self_loop:
                continue
            v = edge.other(u)
            reached = pwl.evaluate(edge.departing(u), t)
            if reached < t:
                raise FifoViolationError(
                    f"edge {key} from {u} to {v} departs at {t} and arrives at {reached}",
                    edge_key=key, direction=(u, v),
                )
            if reached < arrival[v]:
                arrival[v] = reached
                heapq.heappush(heap, (reached, v))
    return arrival


def arrival_table(graph: Graph, source: int, times: Iterable) -> List[OracleResult]:
    return [OracleResult(Fraction(t), td_dijkstra(graph, source, t)) for t in times]


def _guard(graph: Graph) -> None:
    if len(graph) > MAX_ENUMERATION_VERTICES:
        raise SizeGuardError(
            f"path enumeration is limited to {MAX_ENUMERATION_VERTICES} vertices, "
            f"graph has {len(graph)}"
        )


def enumerate_paths_arrival(graph: Graph, u: int, v: int) -> pwl.PwlFunction:
    """
    Minimum over every simple ``u``-``v`` path of the composed edge functions.

    :raises SizeGuardError: above :data:`MAX_ENUMERATION_VERTICES` vertices.
    """
    _guard(graph)
    for vertex in (u, v):
        if vertex not in graph:
            raise StructuralError(f"unknown vertex {vertex}")
    if u == v:
        return pwl.identity()
    best = pwl.infinity()
    for path in nx.all_simple_edge_paths(to_networkx(graph), u, v):
        along = pwl.identity()
        at = u
        for _, _, key in path:
            along = pwl.compose(graph.arrival(key, at), along)
            at = graph.edges[key].other(at)
        best = pwl.minimum(best, along)
    return best


def max_end_to_end_breakpoints(graph: Graph) -> Tuple[int, Optional[Tuple[int, int]]]:
    """Largest breakpoint count of ``A_(u,v)`` over ordered pairs, with the first pair reaching it."""
    _guard(graph)
    best, pair = 0, None
    for u, v in itertools.permutations(graph.vertices, 2):
        count = pwl.breakpoint_count(enumerate_paths_arrival(graph, u, v))
        if pair is None or count > best:
            best, pair = count, (u, v)
    return best, pair


def crosscheck(
    f: pwl.PwlFunction, graph: Graph, s: int, d: int, extra_times: Iterable = ()
) -> CrosscheckReport:
    """
    Compare ``f`` with :func:`td_dijkstra` on the grid of :func:`~tdsp_reduce.pwl.grid`.

    Two piecewise-linear functions agreeing at every breakpoint of ``f``,
    every midpoint and past the last breakpoint agree everywhere provided the
    oracle's breakpoints are among them.
    """
    report = CrosscheckReport(times=pwl.grid(f, list(extra_times)))
    for t in report.times:
        expected = td_dijkstra(graph, s, t)[d]
        got = pwl.evaluate(f, t)
        if expected != got:
            report.mismatches.append(Mismatch(t, expected, got))
    if report.mismatches:
        log.debug("crosscheck found %d mismatches, first %s",
                  len(report.mismatches), report.mismatches[0])
    return report


def running_estimate(graph: Graph) -> pwl.PwlFunction:
    s, d = graph.terminals
    estimate = pwl.infinity()
    for key in graph.edges_between(s, d):
        estimate = pwl.minimum(estimate, graph.arrival(key, s))
    return estimate


class StepChecker:
    """
    ``on_step`` callback that checks every transformation keeps ``A_(s,d)``.

    After each step the working graph's earliest arrival at ``d`` is compared
    with the original graph's at the breakpoints and midpoints of the current
    ``s``-``d`` edge, at zero and at a few seeded random times.  Every created
    edge must also be FIFO in both directions.
    """

    def __init__(self, original: Graph, seed: int = 0, random_times: int = DEFAULT_RANDOM_TIMES):
        if original.terminals is None:
            raise StructuralError("graph has no terminals")
        self.original = original
        self.s, self.d = original.terminals
        rng = random.Random(seed)
        self.random_times = [Fraction(rng.randrange(0, 1000), rng.randrange(1, 8))
                             for _ in range(random_times)]
        self._expected = {}
        self.checks = 0

    def expected(self, t) -> object:
        if t not in self._expected:
            self._expected[t] = td_dijkstra(self.original, self.s, t)[self.d]
        return self._expected[t]

    def __call__(self, graph: Graph, step) -> None:
        for key in step.created:
            edge = graph.edges.get(key)
            if edge is None:
                continue
            for tail, function in ((edge.u, edge.forward), (edge.v, edge.backward)):
                violations = pwl.validate_fifo(function)
                if violations:
                    raise VerificationError(
                        f"{step.kind} created non-FIFO edge {key} from {tail}: {violations[0]}",
                        t=violations[0].t,
                    )
        for t in pwl.grid(running_estimate(graph), self.random_times):
            got = td_dijkstra(graph, self.s, t)[self.d]
            if got != self.expected(t):
                raise VerificationError(
                    f"after {step}: arrival at {self.d} departing {self.s} at t={t} "
                    f"is {got}, expected {self.expected(t)}", t=t,
                )
            self.checks += 1
