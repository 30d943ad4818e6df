from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resultlab import trees
from resultlab._backend import available_backends, get_kernels
from resultlab.rng import stream


def test_python_backend_always_available():
    assert "python" in available_backends()
    assert get_kernels("python").BACKEND_NAME == "python"


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        get_kernels("fortran")


def test_env_var_selects_python(monkeypatch):
    monkeypatch.setenv("RESULTLAB_BACKEND", "python")
    assert get_kernels().BACKEND_NAME == "python"


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_backends_agree_on_all_trees(n):
    total = trees.labeled_tree_count(n)
    a = get_kernels("python").prufer_profiles(n, 0, total)
    b = get_kernels("compiled").prufer_profiles(n, 0, total)
    assert np.array_equal(a, b)


def test_prufer_decode_is_a_tree(backend):
    rng = stream(3)
    for n in (3, 10, 50):
        seq = rng.integers(0, n, size=n - 2)
        edges = get_kernels(backend).prufer_decode(seq, n)
        trees.Tree(n, edges)  # validates


def test_prufer_decode_known(backend):
    # sequence [3, 3, 3] on 5 vertices is the star centred at 3
    edges = get_kernels(backend).prufer_decode(np.array([3, 3, 3]), 5)
    assert sorted(int(v) for e in edges for v in e if v != 3) == [0, 1, 2, 4]


def test_esu_counts_path_and_star(backend):
    k = get_kernels(backend)
    assert list(k.esu_counts(5, trees.path_tree(5).edges)) == [0, 1, 0, 0]
    assert list(k.esu_counts(5, trees.star_tree(5).edges)) == [1, 0, 0, 0]


def test_pa_extend_backends_identical():
    if "compiled" not in available_backends():
        pytest.skip("extension not built")
    out = []
    for name in ("python", "compiled"):
        rng = stream(9)
        t = 3000
        is_w = rng.integers(0, 2, size=t).astype(np.uint8)
        u = rng.random(t)
        parent = np.full(t, -1, dtype=np.int64)
        A = np.zeros(t)
        sums = np.zeros(3)
        get_kernels(name).pa_extend(is_w, 3.0, parent, A, 1, t, u, sums)
        out.append((parent, A, sums))
    assert np.array_equal(out[0][0], out[1][0])
    assert np.allclose(out[0][1], out[1][1], rtol=0, atol=1e-9)
    assert np.allclose(out[0][2], out[1][2], rtol=1e-12)


@given(st.lists(st.integers(1, 10**12), min_size=1, max_size=40))
@settings(max_examples=60, deadline=None)
def test_squarefree_flags_match_trial_division(values):
    from resultlab.sieve848 import _trial_primes, is_squarefree

    arr = np.array(values, dtype=np.int64)
    primes = _trial_primes(int(arr.max()))
    want = [is_squarefree(v) for v in values]
    for name in available_backends():
        got = get_kernels(name).squarefree_flags(arr, primes).astype(bool).tolist()
        assert got == want


def test_squarefree_short_table_raises(backend):
    with pytest.raises(ValueError, match="prime table too short"):
        get_kernels(backend).squarefree_flags(np.array([10**9 + 7]), np.array([2, 3]))


def test_clique_scan_backends_agree():
    from resultlab import cliquecodes

    rng = stream(4)
    for _ in range(30):
        fam = cliquecodes.random_family(7, 3, rng)
        masks = {name: get_kernels(name).clique_scan(7, fam.adjacency()) for name in available_backends()}
        assert len(set(masks.values())) == 1
