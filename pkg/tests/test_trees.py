from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resultlab import trees
from resultlab.rng import stream


@st.composite
def prufer_trees(draw, n_min=1, n_max=30):
    n = draw(st.integers(n_min, n_max))
    seq = draw(st.lists(st.integers(0, n - 1), min_size=max(n - 2, 0), max_size=max(n - 2, 0)))
    return trees.tree_from_prufer(seq, n) if n > 2 else trees.Tree(n, [(0, 1)] if n == 2 else [])


WYE = trees.Tree(5, [(0, 1), (0, 2), (0, 3), (3, 4)])


def test_small_known_counts():
    assert trees.counts_by_formula(trees.star_tree(5)) == (1, 0, 0)
    assert trees.counts_by_formula(trees.path_tree(5)) == (0, 1, 0)
    assert trees.counts_by_formula(WYE) == (0, 0, 1)
    for n in (1, 2, 3, 4):
        assert trees.counts_by_formula(trees.path_tree(n)) == (0, 0, 0)
        assert trees.counts_by_enumeration(trees.path_tree(n)) == (0, 0, 0)


def test_path_formula_terms():
    t = trees.path_tree(5)
    T = [s.T for s in trees.vertex_stats(t)]
    assert T == [1, 1, 2, 1, 1]
    deg = t.degrees()
    twice = sum(T[v] ** 2 - sum((deg[u] - 1) ** 2 for u in t.adjacency[v]) for v in range(5))
    assert twice == 2


def test_invalid_trees_rejected():
    with pytest.raises(ValueError, match="not a tree"):
        trees.Tree(3, [(0, 1)])
    with pytest.raises(ValueError, match="not a tree"):
        trees.Tree(4, [(0, 1), (1, 0), (2, 3)])
    with pytest.raises(ValueError, match="not a tree"):
        trees.Tree(3, [(0, 0), (1, 2)])
    with pytest.raises(ValueError, match="not a tree"):
        trees.Tree(4, [(0, 1), (1, 2), (2, 0)])


def test_oracle_scale():
    with pytest.raises(ValueError, match="oracle scale exceeded"):
        trees.counts_by_enumeration(trees.path_tree(65))


def test_random_n20_three_routes_agree():
    t = trees.random_tree(20, stream(42))
    a = trees.counts_by_formula(t)
    assert a == trees.counts_by_enumeration(t) == trees.counts_by_subsets(t)


def test_identity_on_path_and_edge():
    r = trees.identity_residuals(trees.path_tree(5))
    assert r.lhs1 == -1 and r.rhs1 == -1
    assert r.miracle_ok
    # middle vertex: d=2, T=2, A=0
    assert r.lhs2_terms[2] == -1 == r.miracle_lhs[2]
    assert sum(trees._F(d) for d in trees.path_tree(5).degrees()) == 3
    e = trees.identity_residuals(trees.Tree(2, [(0, 1)]))
    assert (e.lhs1, e.rhs1) == (0, 0)


def test_F_matches_binomial_form():
    from math import comb

    for k in range(1, 30):
        want = Fraction(comb(k - 1, 2) ** 2, 2) + Fraction(k * (k - 1) ** 2, 2) - 9 * comb(k, 4)
        assert trees._F(k) == want


def test_family_coefficients():
    assert trees.family_coefficients(1) == trees.FamilyCoefficients(1, 16, 16, 144)
    assert trees.family_coefficients(2) == trees.FamilyCoefficients(2, 58, 84, 288)
    c = trees.SubtreeCounts(3, 5, 11)
    assert trees.family_lhs(1, c) == 16 * (c.Y - c.P - 9 * c.S)
    assert trees.family_lhs(2, c) == 2 * (29 * c.Y - 42 * c.P - 144 * c.S)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 3), (4, 16), (5, 125)])
def test_enumeration_counts(n, count):
    seen = {tuple(sorted(map(tuple, np.sort(t.edges, axis=1).tolist()))) for t in trees.enumerate_labeled_trees(n)}
    assert len(seen) == count == trees.labeled_tree_count(n)


def test_enumeration_scale():
    with pytest.raises(ValueError, match="enumeration scale exceeded"):
        next(trees.enumerate_labeled_trees(10))


def test_random_tree_small_and_reproducible():
    assert trees.random_tree(1, stream(0)).n == 1
    assert trees.random_tree(2, stream(0)).edges.tolist() in ([[0, 1]], [[1, 0]])
    a = trees.random_tree(30, stream(11)).edges
    b = trees.random_tree(30, stream(11)).edges
    assert np.array_equal(a, b)


def test_profiles_all_n6_trees():
    prof = trees.profile_labeled_range(6, 0, trees.labeled_tree_count(6))
    chk = trees.check_profiles(prof)
    assert chk.trees == 1296
    assert chk.oracle_mismatches == chk.thm1_violations == chk.thm2_violations == 0
    assert chk.identity_failures == chk.miracle_failures == chk.telescope_failures == chk.degree_failures == 0


def test_profile_matches_exact_python():
    t = trees.random_tree(40, stream(5))
    prof = trees.profile_tree(t)
    c = trees.counts_by_formula(t)
    r = trees.identity_residuals(t)
    assert tuple(prof[:3]) == tuple(c) == tuple(prof[3:6])
    assert prof[7] == r.lhs1 and prof[8] == 2 * r.rhs1


@given(prufer_trees(5, 30))
@settings(max_examples=80, deadline=None)
def test_formula_equals_enumeration(t):
    assert trees.counts_by_formula(t) == trees.counts_by_enumeration(t)


@given(prufer_trees(1, 40))
@settings(max_examples=80, deadline=None)
def test_identities_and_inequalities(t):
    c = trees.counts_by_formula(t)
    r = trees.identity_residuals(t)
    assert r.identity_ok and r.miracle_ok
    assert c.Y - 9 * c.S - c.P <= 6
    assert 29 * c.Y - 42 * c.P - 144 * c.S <= 504
    deg = t.degrees()
    assert sum(d - 2 for d in deg) == -2
    assert sum(deg[v] - deg[u] for v in range(t.n) for u in t.adjacency[v]) == 0


@given(prufer_trees(2, 40))
@settings(max_examples=50, deadline=None)
def test_vertex_stats_invariants(t):
    stats = trees.vertex_stats(t)
    assert sum(s.d for s in stats) == 2 * (t.n - 1)
    for s in stats:
        assert s.x == s.d - 1 and s.T >= 0
        assert s.A == (0 if s.d <= 2 else (s.d - 1) * (s.d - 2) // 2)


def test_family_c3_counterexample_small_search():
    # a caterpillar with spine degree 4 already exceeds 504 for C = 3
    best = 0
    for trial in range(60):
        rng = stream(0, trial)
        n = int(rng.integers(50, 401))
        _, t = trees.family_trial_tree(trial, n, rng)
        best = max(best, trees.family_value(3, t))
    assert best > 504


def test_generators_produce_trees():
    rng = stream(1)
    for k in range(3, 8):
        for n in (5, 17, 60):
            trees.Tree(n, trees.random_degree_tree(n, k, rng).edges)
            trees.Tree(n, trees.random_caterpillar(n, k, rng).edges)
