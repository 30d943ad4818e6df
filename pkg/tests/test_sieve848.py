from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resultlab import sieve848 as sv


def test_primes_up_to():
    assert sv.primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert sv.primes_up_to(1).size == 0


@pytest.mark.parametrize("filt, closed", [("all", 6 / math.pi**2), ("p!=5", 25 / (4 * math.pi**2)), ("p!=2,5", 25 / (3 * math.pi**2))])
def test_brackets_contain_closed_forms(filt, closed):
    for pmax in (1000, 100_000):
        tp = sv.truncated_product(filt, 1.0, pmax)
        assert tp.brackets(closed)


def test_truncation_monotone():
    vals = [sv.truncated_product("all", 1.0, p) for p in (100, 1000, 10_000, 100_000)]
    assert all(a.value >= b.value for a, b in zip(vals, vals[1:]))
    assert all(a.tail_bound > b.tail_bound for a, b in zip(vals, vals[1:]))


def test_constants_table_full():
    rows = sv.constants_table(10_000_000)
    assert all(r.ok for r in rows)
    names = {r.constant_name: r for r in rows}
    assert names["1-prod_{p=1(4),p>=13}(1-2/p^2)"].bound <= 0.0274


def test_constants_fail_loudly_at_tiny_pmax():
    with pytest.raises(sv.ConstantVerificationError, match="constant verification failed"):
        sv.constants_table(100)


def test_case_bounds_digits():
    cases = sv.case_bounds(10_000_000)
    assert [c.total for c in cases] == [0.0377, 0.0358, 0.0336, 0.0294]
    assert all(c.ok and c.total < 0.038 for c in cases)


def test_diag_density_routes_agree():
    a = sv.diag_nonsquarefree_trial(100_000)
    b = sv.diag_nonsquarefree_sieve(100_000)
    assert np.array_equal(a, b)
    assert 0.100 <= sv.diag_density(100_000) <= 0.110


def test_diag_density_stabilizes():
    d = [sv.diag_density(n) for n in (10_000, 20_000, 40_000, 80_000)]
    assert all(abs(x - y) <= 0.003 for x, y in zip(d, d[1:]))


def test_diag_small_direct():
    mask = sv.diag_nonsquarefree_trial(200)
    want = [not sv.is_squarefree(a * a + 1) for a in range(1, 201)]
    assert mask.tolist() == want
    assert mask[6]  # 7^2 + 1 = 50


def test_extremal_500():
    res = sv.extremal_search(500)
    assert res.construction_size == 20
    assert res.best_found >= 20 and res.witness_valid
    assert sv.pairwise_valid(res.witness)


def test_max_clique_small_graph():
    # 5-cycle plus a chord: maximum clique is a triangle
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]
    adj = [0] * 5
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    assert sv.max_clique(adj) == [0, 1, 2]


@given(st.integers(0, 2**20))
@settings(max_examples=30, deadline=None)
def test_max_clique_random_vs_bruteforce(seed):
    import itertools

    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 11))
    adj = [0] * k
    for i, j in itertools.combinations(range(k), 2):
        if rng.random() < 0.5:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    best = max(
        (len(s) for r in range(1, k + 1) for s in itertools.combinations(range(k), r) if all(adj[a] >> b & 1 for a, b in itertools.combinations(s, 2))),
        default=0,
    )
    assert len(sv.max_clique(adj)) == best


def test_sieve_lemma_examples():
    r = sv.sieve_lemma_check(1000, 1, 0, {5: [7, 18]})
    assert r.count == 80 and math.isclose(r.main_term, 80)
    empty = sv.sieve_lemma_check(1000, 1, 0, {})
    assert empty.count == 0 and empty.main_term == 0
    big = sv.sieve_lemma_check(10**6, 1, 0, {5: [7, 18], 13: [70, 99]})
    assert big.error / 10**6 <= 0.001


def test_sieve_lemma_ladder_shrinks():
    ladder = sv.sieve_lemma_ladder(10_000, 4, 3, 1, {5: [7, 18], 13: [70, 99], 17: [38, 251]})
    ratios = [c.error / c.N for c in ladder]
    assert ratios[-1] <= ratios[0]


def test_bad_residue_system():
    with pytest.raises(ValueError, match="bad residue system"):
        sv.sieve_lemma_check(100, 5, 0, {5: [7]})
    with pytest.raises(ValueError, match="bad residue system"):
        sv.sieve_lemma_check(100, 1, 0, {5: [1, 2, 3]})
    with pytest.raises(ValueError, match="bad residue system"):
        sv.sieve_lemma_check(100, 1, 0, {6: [1]})


def test_hensel_roots():
    for p in (5, 13, 17, 29, 1009):
        for r in sv._roots_mod_p2(p):
            assert (r * r + 1) % (p * p) == 0
