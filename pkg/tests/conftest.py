"""Shared fixtures and hypothesis strategies."""
# std imports
import os
from fractions import Fraction

# 3rd party
import pytest
from hypothesis import strategies as st

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import Graph
from tdsp_reduce.generators import GENERATORS, ExperimentConfig, generate

DATA_PATH = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def data_file(fname):
    return os.path.join(DATA_PATH, fname)


def shift(delta):
    return pwl.linear(1, delta)


@st.composite
def fifo_functions(draw, max_pieces=4):
    """Continuous FIFO functions with rational breakpoints and slopes."""
    pieces = draw(st.integers(1, max_pieces))
    t = Fraction(0)
    value = Fraction(draw(st.integers(0, 20)), draw(st.integers(1, 4)))
    points = [(t, value)]
    for _ in range(pieces - 1):
        step = Fraction(draw(st.integers(1, 20)), draw(st.integers(1, 4)))
        # least slope keeping f(t + step) >= t + step
        lowest = max(Fraction(0), (t + step - value) / step)
        slope = lowest + Fraction(draw(st.integers(0, 12)), 4)
        t, value = t + step, value + slope * step
        points.append((t, value))
    final = 1 + Fraction(draw(st.integers(0, 8)), 4)
    return pwl.from_points(points, final)


def arrival_functions(max_pieces=4):
    """FIFO functions, now and then the infinite one."""
    return st.one_of(fifo_functions(max_pieces), st.just(pwl.infinity()))


departure_times = st.fractions(min_value=0, max_value=200, max_denominator=16)


@st.composite
def instances(draw, max_n=8, generators=GENERATORS):
    config = ExperimentConfig(
        generator=draw(st.sampled_from(generators)),
        n=draw(st.integers(2, max_n)),
        w=draw(st.integers(1, 3)),
        seed=draw(st.integers(0, 10_000)),
        pieces_per_edge=draw(st.integers(1, 3)),
    )
    return generate(config)


@pytest.fixture
def path_graph():
    """s=1 - a=2 - d=3 with shifts t+1 and t+2."""
    graph = Graph(range(1, 4), terminals=(1, 3))
    graph.add_edge(1, 2, shift(1), shift(1))
    graph.add_edge(2, 3, shift(2), shift(2))
    return graph


@pytest.fixture
def cycle4():
    """s=1, a=2, d=3, b=4 on a 4-cycle with unit shifts."""
    graph = Graph(range(1, 5), terminals=(1, 3))
    for u, v in ((1, 2), (2, 3), (3, 4), (4, 1)):
        graph.add_edge(u, v, shift(1), shift(1))
    return graph


@pytest.fixture
def ladder6():
    """2x3 ladder, rails 1-2-3 and 4-5-6, s=1 and d=6, one bent edge."""
    graph = Graph(range(1, 7), terminals=(1, 6))
    graph.add_edge(1, 2, shift(1), shift(1))
    graph.add_edge(2, 3, pwl.from_points([(0, 1), (4, 5)], 2), shift(1))
    graph.add_edge(4, 5, pwl.from_points([(0, 3), (2, 3)], 1), shift(1))
    graph.add_edge(5, 6, shift(1), shift(1))
    for u in (1, 2, 3):
        graph.add_edge(u, u + 3, shift(2), shift(2))
    return graph
