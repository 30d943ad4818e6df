from __future__ import annotations

from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resultlab import cliquecodes as cc
from resultlab._backend import available_backends
from resultlab.rng import stream


def test_edge_index_lexicographic():
    n = 6
    assert [cc.edge_index(i, j, n) for i, j in cc.edge_list(n)] == list(range(comb(n, 2)))
    with pytest.raises(ValueError):
        cc.edge_index(2, 2, n)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 15])
def test_odd_construction_verified(n, backend):
    fam = cc.alon_checks(n)
    assert fam.r == (n - 1) // 2
    assert cc.verify_clique_avoiding(fam, backend) == (True, None)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12, 14])
def test_even_family_verified(n):
    fam = cc.even_checks(n)
    assert fam.r == n // 2
    assert cc.verify_clique_avoiding(fam)[0]


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_naive_agrees(n):
    assert cc.verify_naive(cc.checks_for(n))


def test_failures_reported():
    assert cc.verify_clique_avoiding(cc.ParityCheckFamily(4, ())) == (False, 3)
    all_ones = cc.ParityCheckFamily(4, ((1 << 6) - 1,))
    ok, mask = cc.verify_clique_avoiding(all_ones)
    assert not ok and mask == 0b1111  # K_4 has 6 edges: even
    assert not cc.verify_naive(all_ones)
    with pytest.raises(ValueError, match="scale exceeded"):
        cc.verify_clique_avoiding(cc.ParityCheckFamily(25, ()))


def test_exhaustive_lower_bounds():
    assert cc.min_codim_exists(4, 1) == cc.PROVEN_NO
    assert cc.min_codim_exists(5, 1) == cc.PROVEN_NO
    assert cc.min_codim_exists(4, 2) == cc.FOUND_YES
    assert cc.min_codim_exists(5, 2) == cc.FOUND_YES
    with pytest.raises(ValueError, match="need budget"):
        cc.min_codim_exists(6, 2)


def test_random_search_finds_example():
    assert cc.min_codim_exists(6, 6, budget=200, rng=stream(0)) == cc.FOUND_YES


def test_random_codes_succeed_sometimes():
    wins = sum(cc.random_code_trial(8, 8, stream(1, t)) for t in range(200))
    assert wins >= 1


def test_gf2_solver():
    rows = [0b011, 0b110, 0b101]
    x = cc.solve_gf2(rows, [1, 1, 0], 3)
    assert x is not None and all((r & x).bit_count() % 2 == b for r, b in zip(rows, [1, 1, 0]))
    assert cc.solve_gf2([0b11, 0b11], [0, 1], 2) is None


@given(st.integers(3, 9), st.integers(1, 4), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_scan_matches_uncovered_sets(n, r, seed):
    fam = cc.random_family(n, r, stream(seed))
    bad = cc.uncovered_sets(fam)
    ok, mask = cc.verify_clique_avoiding(fam)
    assert ok == (not bad)
    if not ok:
        assert mask in bad
        assert all(cc.parity(c, cc.clique_indicator(cc.mask_to_set(mask), n)) == 0 for c in fam.checks)
