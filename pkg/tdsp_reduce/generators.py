"""
Seeded instance families for tests and the breakpoint-growth experiment.

Every generator returns an :class:`Instance`: a graph on vertices ``1..n``
with terminals ``s = 1`` and ``d = n``, together with the decomposition the
construction naturally provides.  Edge functions are FIFO by construction.
"""
# std imports
import time
import random
import logging
import itertools
from fractions import Fraction
from typing import Dict, List, Tuple, NamedTuple
from dataclasses import dataclass

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import Graph, total_pieces
from tdsp_reduce.errors import ConfigError
from tdsp_reduce.oracle import MAX_ENUMERATION_VERTICES, enumerate_paths_arrival
from tdsp_reduce.reduction import reduce_to_terminals
from tdsp_reduce.treedecomp import TreeDecomposition, width

log = logging.getLogger(__name__)

GENERATORS = ("chain", "layered", "series_parallel", "random_partial_ktree")

CSV_COLUMNS = (
    "generator", "seed", "n", "w", "td_width", "K", "breakpoints",
    "star_mesh_count", "parallel_count", "max_degree", "wall_time", "oracle_agrees",
)

# slopes of generated pieces; consecutive pieces always differ
SLOPES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))

# oracle column is only filled for instances this small
CROSSCHECK_MAX_VERTICES = 10


class Instance(NamedTuple):
    graph: Graph
    decomposition: TreeDecomposition


@dataclass(frozen=True)
class ExperimentConfig:
    generator: str = "layered"
    n: int = 10
    w: int = 2
    seed: int = 0
    pieces_per_edge: int = 2

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}, expected one of {GENERATORS}")
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if self.w < 1:
            raise ConfigError(f"w must be at least 1, got {self.w}")
        if self.pieces_per_edge < 1:
            raise ConfigError(f"pieces_per_edge must be at least 1, got {self.pieces_per_edge}")

    @property
    def rng(self) -> random.Random:
        return random.Random(f"{self.generator}:{self.n}:{self.w}:{self.seed}")


def random_arrival(rng: random.Random, pieces: int) -> pwl.PwlFunction:
    """
    Random FIFO function with exactly ``pieces`` linear pieces.

    Integer breakpoints, an offset between 1 and 10 at ``t = 0`` and slopes
    drawn from :data:`SLOPES`, keeping ``f(t) >= t`` at every breakpoint and
    a last slope of at least one.
    """
    t, value = Fraction(0), Fraction(rng.randint(1, 10))
    points = [(t, value)]
    slope = None
    for _ in range(pieces - 1):
        step = rng.randint(1, 10)
        choices = [candidate for candidate in SLOPES
                   if candidate != slope and value + candidate * step >= t + step]
        slope = rng.choice(choices)
        t, value = t + step, value + slope * step
        points.append((t, value))
    final = rng.choice([candidate for candidate in SLOPES if candidate >= 1 and candidate != slope])
    return pwl.from_points(points, final)


def _add_random_edge(graph: Graph, rng: random.Random, u: int, v: int, pieces: int) -> int:
    return graph.add_edge(u, v, random_arrival(rng, pieces), random_arrival(rng, pieces))


def _path_decomposition(bags: List[frozenset]) -> TreeDecomposition:
    return TreeDecomposition(
        dict(enumerate(bags, 1)),
        [(idx, idx + 1) for idx in range(1, len(bags))],
        root=len(bags),
    )


def chain(n: int, rng: random.Random, pieces: int = 2) -> Instance:
    """The path ``1 - 2 - ... - n``."""
    graph = Graph(range(1, n + 1), terminals=(1, n))
    for u in range(1, n):
        _add_random_edge(graph, rng, u, u + 1, pieces)
    return Instance(graph, _path_decomposition([frozenset((u, u + 1)) for u in range(1, n)]))


def layered(n: int, w: int, rng: random.Random, pieces: int = 2) -> Instance:
    """
    ``s``, layers of at most ``w + 1`` vertices, then ``d``.

    Consecutive layers are joined completely; the decomposition is the path
    of unions of consecutive layer pairs.
    """
    inner = list(range(2, n))
    layers = [[1]]
    layers += [inner[pos:pos + w + 1] for pos in range(0, len(inner), w + 1)]
    layers.append([n])
    graph = Graph(range(1, n + 1), terminals=(1, n))
    for left, right in zip(layers, layers[1:]):
        for u, v in itertools.product(left, right):
            _add_random_edge(graph, rng, u, v, pieces)
    return Instance(graph, _path_decomposition(
        [frozenset(left + right) for left, right in zip(layers, layers[1:])]
    ))


def series_parallel(n: int, rng: random.Random, pieces: int = 2) -> Instance:
    """
    Two-terminal series-parallel graph grown from a single edge.

    Each new vertex either subdivides a random edge or opens a two-edge
    route parallel to it; its bag holds the edge ends and itself, so the
    decomposition has width two.
    """
    # internal labels: 0 = s, 1 = d, then 2.. in creation order
    edges = {(0, 1): 1}
    bags = {1: frozenset((0, 1))}
    tree_edges = []
    for new in range(2, n):
        u, v = rng.choice(sorted(edges))
        parent = edges[(u, v)]
        idx = len(bags) + 1
        bags[idx] = frozenset((u, v, new))
        tree_edges.append((parent, idx))
        if rng.random() < 0.5:
            del edges[(u, v)]
        edges[(u, new)] = idx
        edges[(new, v)] = idx
    label = {0: 1, 1: n}
    label.update({internal: internal for internal in range(2, n)})
    graph = Graph(range(1, n + 1), terminals=(1, n))
    for u, v in sorted(edges):
        _add_random_edge(graph, rng, label[u], label[v], pieces)
    td = TreeDecomposition(
        {idx: {label[x] for x in bag} for idx, bag in bags.items()}, tree_edges, root=1
    )
    return Instance(graph, td)


def random_partial_ktree(n: int, w: int, rng: random.Random, pieces: int = 2) -> Instance:
    """
    Random ``w``-tree with some of its edges dropped.

    Vertices join in random order, each attached to a random ``w``-clique.
    One edge per joining vertex is always kept so the graph stays
    connected; any other edge is dropped with probability 0.3.
    """
    k = min(w, n - 1)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    base = order[:k + 1]
    bags = {1: frozenset(base)}
    tree_edges = []
    cliques = [(frozenset(c), 1) for c in itertools.combinations(sorted(base), k)]
    kept = set(zip(base, base[1:]))
    candidates = set(itertools.combinations(base, 2))
    for vertex in order[k + 1:]:
        clique, parent = rng.choice(cliques)
        idx = len(bags) + 1
        bags[idx] = clique | {vertex}
        tree_edges.append((parent, idx))
        neighbors = sorted(clique)
        kept.add((rng.choice(neighbors), vertex))
        candidates.update((u, vertex) for u in neighbors)
        cliques.extend(((clique - {x}) | {vertex}, idx) for x in neighbors)
    graph = Graph(range(1, n + 1), terminals=(1, n))
    for u, v in sorted(candidates):
        if (u, v) in kept or rng.random() >= 0.3:
            _add_random_edge(graph, rng, u, v, pieces)
    return Instance(graph, TreeDecomposition(bags, tree_edges, root=1))


def generate(config: ExperimentConfig) -> Instance:
    rng = config.rng
    if config.generator == "chain":
        return chain(config.n, rng, config.pieces_per_edge)
    if config.generator == "layered":
        return layered(config.n, config.w, rng, config.pieces_per_edge)
    if config.generator == "series_parallel":
        return series_parallel(config.n, rng, config.pieces_per_edge)
    return random_partial_ktree(config.n, config.w, rng, config.pieces_per_edge)


def experiment_row(config: ExperimentConfig, timing: bool = True, crosscheck: bool = False) -> Dict[str, object]:
    """
    Generate one instance, reduce it and return its CSV row.

    ``oracle_agrees`` is filled only with ``crosscheck`` on instances of at
    most :data:`CROSSCHECK_MAX_VERTICES` vertices, and is empty otherwise.
    """
    graph, td = generate(config)
    start = time.perf_counter()
    A_sd, _, trace = reduce_to_terminals(graph, td)
    elapsed = time.perf_counter() - start
    agrees = ""
    if crosscheck and len(graph) <= min(CROSSCHECK_MAX_VERTICES, MAX_ENUMERATION_VERTICES):
        agrees = A_sd == enumerate_paths_arrival(graph, 1, config.n)
    row = {
        "generator": config.generator,
        "seed": config.seed,
        "n": config.n,
        "w": config.w,
        "td_width": width(td),
        "K": total_pieces(graph),
        "breakpoints": pwl.breakpoint_count(A_sd),
        "star_mesh_count": trace.star_mesh_count,
        "parallel_count": trace.parallel_count,
        "max_degree": trace.max_star_degree,
        "wall_time": round(elapsed, 6) if timing else 0,
        "oracle_agrees": agrees,
    }
    log.debug("experiment row %s", row)
    return row


def sort_rows(rows: List[Dict[str, object]]) -> List[Dict[str, object]]:
    return sorted(rows, key=lambda row: (row["generator"], row["n"], row["w"], row["seed"]))


def experiment_configs(generator: str, ns, ws, seed: int, pieces_per_edge: int, repeat: int) -> List[ExperimentConfig]:
    """Cartesian product of sizes and widths, ``repeat`` consecutive seeds each."""
    return [
        ExperimentConfig(generator, n, w, seed + offset, pieces_per_edge)
        for n, w, offset in itertools.product(ns, ws, range(repeat))
    ]


def experiment_rows(configs, timing: bool = True, crosscheck: bool = False) -> List[Dict[str, object]]:
    return sort_rows([experiment_row(config, timing, crosscheck) for config in configs])


def format_csv_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def instance_stats(instance: Instance) -> Tuple[int, int, int]:
    """``(n, edges, K)`` of an instance."""
    return len(instance.graph), len(instance.graph.edges), total_pieces(instance.graph)
