import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from homcone.matrix import Structure
from homcone.pattern import Ordering, SparsityPattern


def _edges_1based(pairs):
    return [(i - 1, j - 1) for i, j in pairs]


# Smallest non-trivial homogeneous chordal pattern: two leaves under a root.
VINBERG_EDGES = _edges_1based([(1, 3), (2, 3)])

# The 12-vertex recognition example (26 edges; degrees 4,3,3,3,6,5,3,11,4,3,2,5).
PAPER12_EDGES = _edges_1based([
    (1, 6), (1, 8), (1, 9), (1, 12),
    (2, 6), (2, 8), (2, 12),
    (3, 5), (3, 8), (3, 10),
    (4, 5), (4, 7), (4, 8),
    (5, 7), (5, 8), (5, 10), (5, 11),
    (6, 8), (6, 9), (6, 12),
    (7, 8),
    (8, 9), (8, 10), (8, 11), (8, 12),
    (9, 12),
])

# Expected recognition output for PAPER12 (1-based).
PAPER12_SIGMA = (2, 1, 9, 6, 12, 11, 4, 7, 3, 10, 5, 8)
PAPER12_PARENT = (9, 6, 10, 7, 8, 12, 5, 8, 6, 5, 5, 8)

# Same 12 vertices relabeled so the natural order is trivially perfect
# (nested block-arrow form); used for the supernode example.
ARROW12_EDGES = _edges_1based([
    (1, 4), (1, 5), (1, 12),
    (2, 3), (2, 4), (2, 5), (2, 12),
    (3, 4), (3, 5), (3, 12),
    (4, 5), (4, 12),
    (5, 12),
    (6, 11), (6, 12),
    (7, 8), (7, 11), (7, 12),
    (8, 11), (8, 12),
    (9, 10), (9, 11), (9, 12),
    (10, 11), (10, 12),
    (11, 12),
])

# 9-vertex chordal (but not homogeneous chordal) example graph.
FIG1_EDGES = _edges_1based([
    (1, 2), (1, 7), (1, 8),
    (2, 5), (2, 7), (2, 8),
    (3, 5), (3, 8),
    (4, 6), (4, 9),
    (5, 7), (5, 8),
    (6, 8), (6, 9),
    (7, 8), (7, 9),
    (8, 9),
])


@pytest.fixture
def vinberg_pattern():
    return SparsityPattern(3, VINBERG_EDGES)


@pytest.fixture
def vinberg_struct(vinberg_pattern):
    return Structure(vinberg_pattern, Ordering.identity(3))


@pytest.fixture
def vinberg_x(vinberg_struct):
    """The running 3x3 example [[2,0,1],[0,3,1],[1,1,2]], det 7."""
    from homcone.matrix import project

    return project(np.array([[2.0, 0.0, 1.0],
                             [0.0, 3.0, 1.0],
                             [1.0, 1.0, 2.0]]), vinberg_struct)


@pytest.fixture
def paper12_pattern():
    return SparsityPattern(12, PAPER12_EDGES)


@pytest.fixture
def arrow12_pattern():
    return SparsityPattern(12, ARROW12_EDGES)


@pytest.fixture
def fig1_pattern():
    return SparsityPattern(9, FIG1_EDGES)


@pytest.fixture
def rng():
    return np.random.default_rng(20240731)
