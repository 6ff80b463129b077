import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homcone.densecheck import find_forbidden_subgraph, has_forbidden_subgraph
from homcone.errors import OrderingError, PatternError
from homcone.pattern import (
    EliminationTree,
    Ordering,
    OrderingClass,
    SparsityPattern,
    build_etree,
    homogeneous_extension,
    is_postordering,
    lbfs_order,
    random_homogeneous_pattern,
    supernode_partition,
    verify_ordering,
)

from conftest import PAPER12_PARENT, PAPER12_SIGMA


def test_pattern_validation():
    with pytest.raises(PatternError):
        SparsityPattern(3, [(0, 0)])
    with pytest.raises(PatternError):
        SparsityPattern(3, [(0, 1), (1, 0)])
    with pytest.raises(PatternError):
        SparsityPattern(2, [(0, 2)])
    with pytest.raises(PatternError):
        SparsityPattern(0, [])
    p = SparsityPattern(4, [(0, 2), (1, 2)])
    assert p.degree(2) == 2 and p.degree(3) == 0
    assert p.has_edge(2, 0) and not p.has_edge(0, 1)
    assert p.n_edges == 2


class TestLbfs:
    def test_paper12_exact(self, paper12_pattern):
        res = lbfs_order(paper12_pattern)
        assert res.accepted
        sigma_1based = tuple(v + 1 for v in res.ordering.sigma)
        parent_1based = tuple(res.etree.parent[v] + 1 for v in range(12))
        assert sigma_1based == PAPER12_SIGMA
        assert parent_1based == PAPER12_PARENT
        assert res.etree.roots == (7,)  # vertex 8

    def test_single_vertex(self):
        res = lbfs_order(SparsityPattern(1, []))
        assert res.accepted
        assert res.ordering.sigma == (0,)
        assert res.etree.parent == (0,)

    def test_star(self):
        # center vertex 3, leaves first, all parents = center
        res = lbfs_order(SparsityPattern(4, [(0, 3), (1, 3), (2, 3)]))
        assert res.accepted
        assert res.ordering.sigma[-1] == 3
        assert all(res.etree.parent[v] == 3 for v in range(3))
        assert find_forbidden_subgraph(SparsityPattern(4, [(0, 3), (1, 3), (2, 3)])) is None

    def test_empty_graph_forest(self):
        res = lbfs_order(SparsityPattern(5, []))
        assert res.accepted
        assert all(res.etree.parent[v] == v for v in range(5))

    def test_rejects_c4(self):
        res = lbfs_order(SparsityPattern(4, [(0, 1), (1, 2), (2, 3), (0, 3)]))
        assert not res.accepted
        assert 0 <= res.pivot < 4

    def test_rejects_p4(self):
        res = lbfs_order(SparsityPattern(4, [(0, 1), (1, 2), (2, 3)]))
        assert not res.accepted

    def test_deterministic(self, paper12_pattern):
        a = lbfs_order(paper12_pattern)
        b = lbfs_order(paper12_pattern)
        assert a.ordering.sigma == b.ordering.sigma
        assert a.etree.parent == b.etree.parent

    def test_accept_invariants(self, paper12_pattern):
        res = lbfs_order(paper12_pattern)
        assert verify_ordering(paper12_pattern, res.ordering) is \
            OrderingClass.TRIVIALLY_PERFECT_PEO
        assert is_postordering(res.etree, res.ordering)

    def test_comparability_property(self, paper12_pattern):
        res = lbfs_order(paper12_pattern)
        parent = res.etree.parent
        n = paper12_pattern.n

        def ancestors(v):
            out = set()
            while parent[v] != v:
                v = parent[v]
                out.add(v)
            return out

        anc = [ancestors(v) for v in range(n)]
        for u in range(n):
            for v in range(u + 1, n):
                comparable = v in anc[u] or u in anc[v]
                assert comparable == paper12_pattern.has_edge(u, v)


class TestVerifyOrdering:
    def test_vinberg_natural_is_tpeo(self, vinberg_pattern):
        assert verify_ordering(vinberg_pattern, Ordering.identity(3)) is \
            OrderingClass.TRIVIALLY_PERFECT_PEO

    def test_vinberg_swapped_is_peo_only(self, vinberg_pattern):
        # positions: vertex0 first, vertex2 second, vertex1 last
        ordering = Ordering.from_sigma((0, 2, 1))
        assert verify_ordering(vinberg_pattern, ordering) is OrderingClass.PEO

    def test_c4_never_peo(self):
        c4 = SparsityPattern(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        for perm in itertools.permutations(range(4)):
            assert verify_ordering(c4, Ordering.from_sigma(perm)) is \
                OrderingClass.NOT_PEO

    def test_dimension_mismatch(self, vinberg_pattern):
        with pytest.raises(OrderingError):
            verify_ordering(vinberg_pattern, Ordering.identity(4))


class TestEtree:
    def test_vinberg(self, vinberg_pattern):
        t = build_etree(vinberg_pattern, Ordering.identity(3))
        assert t.parent == (2, 2, 2)
        assert t.roots == (2,)
        assert t.children[2] == (0, 1)

    def test_matches_lbfs(self, paper12_pattern):
        res = lbfs_order(paper12_pattern)
        t = build_etree(paper12_pattern, res.ordering)
        assert t.parent == res.etree.parent

    def test_diagonal_pattern(self):
        t = build_etree(SparsityPattern(4, []), Ordering.identity(4))
        assert t.parent == (0, 1, 2, 3)
        assert t.roots == (0, 1, 2, 3)

    def test_check_flag(self):
        c4 = SparsityPattern(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        with pytest.raises(OrderingError):
            build_etree(c4, Ordering.identity(4), check=True)


class TestSupernodes:
    def test_arrow12(self, arrow12_pattern):
        ordering = Ordering.identity(12)
        etree = build_etree(arrow12_pattern, ordering)
        sn = supernode_partition(arrow12_pattern, ordering, etree)
        reps = tuple(r + 1 for r in sn.representatives)
        assert reps == (1, 2, 4, 6, 7, 9, 11, 12)
        groups = {tuple(sorted(v + 1 for v in g)) for g in sn.members}
        assert groups == {(1,), (2, 3), (4, 5), (6,), (7, 8), (9, 10), (11,), (12,)}

    def test_empty_pattern(self):
        p = SparsityPattern(3, [])
        ordering = Ordering.identity(3)
        sn = supernode_partition(p, ordering, build_etree(p, ordering))
        assert sn.n_supernodes == 3

    def test_dense_single_supernode(self):
        p = SparsityPattern(4, list(itertools.combinations(range(4), 2)))
        ordering = Ordering.identity(4)
        sn = supernode_partition(p, ordering, build_etree(p, ordering))
        assert sn.n_supernodes == 1
        assert sorted(sn.members[0]) == [0, 1, 2, 3]

    def test_contiguous_runs(self):
        gen = random_homogeneous_pattern(40, seed=7, branching=2.5)
        sn = supernode_partition(gen.pattern, gen.ordering, gen.etree)
        for g in sn.members:
            lo, hi = min(g), max(g)
            assert sorted(g) == list(range(lo, hi + 1))
        # every supernode induces a clique
        for g in sn.members:
            for u, v in itertools.combinations(g, 2):
                assert gen.pattern.has_edge(u, v)

    def test_precondition(self):
        c4 = SparsityPattern(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        with pytest.raises(OrderingError):
            supernode_partition(c4, Ordering.identity(4),
                                EliminationTree.from_parent((1, 2, 3, 3)))


class TestExtension:
    def test_already_homogeneous_unchanged(self, vinberg_pattern):
        ext = homogeneous_extension(vinberg_pattern)
        assert ext.extended == vinberg_pattern

    def test_tridiagonal_closes_to_dense(self):
        tri = SparsityPattern(4, [(0, 1), (1, 2), (2, 3)])
        ext = homogeneous_extension(tri)
        added = ext.extended.edges - tri.edges
        assert added == {(0, 2), (0, 3), (1, 3)}
        assert verify_ordering(ext.extended, ext.ordering) is \
            OrderingClass.TRIVIALLY_PERFECT_PEO

    def test_c4_gets_fill(self):
        c4 = SparsityPattern(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        ext = homogeneous_extension(c4)
        assert ext.extended.n_edges > 4
        assert lbfs_order(ext.extended).accepted

    def test_superset_and_recognized(self, fig1_pattern):
        ext = homogeneous_extension(fig1_pattern)
        assert ext.extended.edges >= fig1_pattern.edges
        assert lbfs_order(ext.extended).accepted
        assert is_postordering(ext.etree, ext.ordering)


class TestRandomPattern:
    def test_single_vertex(self):
        gen = random_homogeneous_pattern(1, seed=0)
        assert gen.pattern.n_edges == 0

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    @pytest.mark.parametrize("branching", [1.0, 2.0, 5.0])
    def test_always_accepted(self, seed, branching):
        gen = random_homogeneous_pattern(30, seed=seed, branching=branching)
        assert lbfs_order(gen.pattern).accepted
        assert verify_ordering(gen.pattern, gen.ordering) is \
            OrderingClass.TRIVIALLY_PERFECT_PEO
        assert is_postordering(gen.etree, gen.ordering)

    def test_reproducible(self):
        a = random_homogeneous_pattern(25, seed=42, branching=3.0)
        b = random_homogeneous_pattern(25, seed=42, branching=3.0)
        assert a.pattern == b.pattern
        assert a.etree.parent == b.etree.parent

    def test_forest_possible(self):
        # with bushy branching the top level usually splits into several roots
        roots = set()
        for seed in range(12):
            gen = random_homogeneous_pattern(40, seed=seed, branching=4.0)
            roots.add(len(gen.etree.roots))
        assert max(roots) > 1


def _pattern_from_bits(n, bits):
    pairs = list(itertools.combinations(range(n), 2))
    return SparsityPattern(n, [e for e, b in zip(pairs, bits) if b])


@settings(max_examples=250, deadline=None)
@given(st.integers(1, 8).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(
        st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))))
def test_recognition_matches_forbidden_subgraph_scan(args):
    n, bits = args
    p = _pattern_from_bits(n, bits)
    accepted = lbfs_order(p).accepted
    assert accepted == (not has_forbidden_subgraph(p))
    if accepted:
        res = lbfs_order(p)
        assert verify_ordering(p, res.ordering) is OrderingClass.TRIVIALLY_PERFECT_PEO
        assert is_postordering(res.etree, res.ordering)


def test_rejection_always_has_witness(rng):
    for _ in range(60):
        n = int(rng.integers(4, 24))
        m = int(rng.integers(n, 3 * n))
        pairs = list(itertools.combinations(range(n), 2))
        take = rng.choice(len(pairs), size=min(m, len(pairs)), replace=False)
        p = SparsityPattern(n, [pairs[t] for t in take])
        res = lbfs_order(p)
        if not res.accepted:
            assert has_forbidden_subgraph(p)
            w = find_forbidden_subgraph(p)
            assert w is not None and w.kind in ("P4", "C4")
