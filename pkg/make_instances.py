#!/usr/bin/env python
"""
Write the sample instances of data/.

The hand-made instances are the small examples used by the documentation
and tests; ``--generated`` also writes one instance of every generator
family under data/generated/.
"""
import os
import sys
import argparse

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import Graph, write_graph
from tdsp_reduce.generators import GENERATORS, ExperimentConfig, generate, instance_stats
from tdsp_reduce.treedecomp import TreeDecomposition, write_decomposition

DATA_PATH = os.path.join(os.path.dirname(__file__), "data")


def shift(delta):
    return pwl.linear(1, delta)


def make_path():
    graph = Graph(range(1, 4), terminals=(1, 3))
    graph.add_edge(1, 2, shift(1), shift(1))
    graph.add_edge(2, 3, shift(2), shift(2))
    return graph, TreeDecomposition({1: {1, 2}, 2: {2, 3}}, [(1, 2)])


def make_cycle4():
    # s=1, a=2, d=3, b=4
    graph = Graph(range(1, 5), terminals=(1, 3))
    for u, v in ((1, 2), (2, 3), (3, 4), (4, 1)):
        graph.add_edge(u, v, shift(1), shift(1))
    return graph, TreeDecomposition({1: {1, 2, 3}, 2: {1, 3, 4}}, [(1, 2)])


def make_ladder():
    # rails 1-2-3-4 and 5-6-7-8, rungs i - i+4
    graph = Graph(range(1, 9), terminals=(1, 8))
    for u in (1, 2, 3):
        forward = pwl.from_points([(0, 1), (4, 5)], 2) if u == 2 else shift(1)
        graph.add_edge(u, u + 1, forward, shift(1))
    for u in (5, 6, 7):
        forward = pwl.from_points([(0, 3), (2, 3)], 1) if u == 6 else shift(1)
        graph.add_edge(u, u + 1, forward, shift(1))
    for u in (1, 2, 3, 4):
        graph.add_edge(u, u + 4, shift(2), shift(2))
    bags = [{1, 5, 2}, {5, 2, 6}, {2, 6, 3}, {6, 3, 7}, {3, 7, 4}, {7, 4, 8}]
    return graph, TreeDecomposition(dict(enumerate(bags, 1)), [(i, i + 1) for i in range(1, 6)])


SAMPLES = {
    "path": (make_path, "path s-a-d with shifts t+1 and t+2"),
    "cycle4": (make_cycle4, "4-cycle s-a-d-b with unit shifts"),
    "ladder": (make_ladder, "2x4 ladder, s and d at opposite corners"),
}


def write_instance(directory, name, graph, td, comment):
    print(f'Writing {directory}/{name}.tdg ... ', file=sys.stderr, end='', flush=True)
    write_graph(graph, os.path.join(directory, f"{name}.tdg"), comment)
    write_decomposition(td, os.path.join(directory, f"{name}.td"), len(graph))
    print('ok', file=sys.stderr)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--generated", action="store_true", default=False,
                        help="also write one instance of every generator family")
    parser.add_argument("--n", type=int, default=12)
    parser.add_argument("--w", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    for name, (make, comment) in SAMPLES.items():
        graph, td = make()
        write_instance(DATA_PATH, name, graph, td, comment)
    if args.generated:
        directory = os.path.join(DATA_PATH, "generated")
        os.makedirs(directory, exist_ok=True)
        for generator in GENERATORS:
            config = ExperimentConfig(generator, args.n, args.w, args.seed)
            instance = generate(config)
            n, m, k = instance_stats(instance)
            write_instance(directory, f"{generator}-n{args.n}-w{args.w}-s{args.seed}",
                           instance.graph, instance.decomposition,
                           f"{generator} n={n} edges={m} K={k} seed={args.seed}")


if __name__ == "__main__":
    main()
