from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resultlab import patree
from resultlab._backend import available_backends
from resultlab.rng import stream


def test_f_forms_agree():
    for w in (1.0, 1.5, 2.0, 5.0, 100.0):
        assert math.isclose(patree.f_of_w(w), patree.f_of_w_partial(w), rel_tol=1e-14)
    assert math.isclose(patree.f_of_w(1.0), 2 / 3)


@given(st.floats(1.0, 1e4))
@settings(max_examples=100, deadline=None)
def test_f_inverse_roundtrip(w):
    assert patree.f_prime(w) >= 0
    back = patree.f_inverse(patree.f_of_w(w))
    assert math.isclose(back, w, rel_tol=1e-6) or w > 1e3


def test_f_inverse_clamps():
    assert patree.f_inverse(0.5) == 1.0
    assert patree.f_inverse(0.75) == math.inf


def test_leaf_limits_sum():
    for w in (1.0, 2.0, 5.0):
        f, f1, fw = patree.leaf_limits(w)
        assert math.isclose(f, f1 + fw, rel_tol=1e-14)


def test_simulation_bookkeeping():
    tree = patree.simulate(3.0, 5000, stream(1), check_every=1000)
    assert tree.checks == 5
    patree._verify(tree)
    deg = tree.degrees()
    assert deg.sum() == 2 * (tree.t - 1)
    assert tree.parent[1] == 0 and np.all(tree.parent[1:] < np.arange(1, tree.t))


def test_bad_inputs():
    with pytest.raises(ValueError):
        patree.simulate(0.5, 10, stream(0))
    with pytest.raises(ValueError, match="leaves undefined"):
        patree.leaf_stats(patree.simulate(2.0, 1, stream(0)))


@pytest.mark.skipif(len(available_backends()) < 2, reason="extension not built")
def test_backends_grow_identical_trees():
    a = patree.simulate(2.0, 20_000, stream(4), backend="python")
    b = patree.simulate(2.0, 20_000, stream(4), backend="compiled")
    assert np.array_equal(a.parent, b.parent)


def test_state_prefix_consistent():
    tree = patree.simulate(2.0, 3000, stream(2))
    s = patree.state_at(tree, tree.t)
    assert np.allclose(s.A, tree.A)
    assert math.isclose(s.S, tree.S, rel_tol=1e-12)


def test_drift_identities_exact_and_mc():
    tree = patree.simulate(2.0, 4000, stream(3))
    rng = stream(3, 0, 1)
    for s in (2, 3, 10, 500, 4000):
        audit = patree.drift_audit(patree.state_at(tree, s), 4000, rng)
        assert audit.exact_ok, [(c.name, c.exact, c.closed_form) for c in audit.checks]


def test_drift_mc_agrees_mostly():
    tree = patree.simulate(5.0, 2000, stream(5))
    audits = [patree.drift_audit(patree.state_at(tree, s), 3000, stream(5, s)) for s in range(100, 2001, 100)]
    bad = sum(not c.mc_ok for a in audits for c in a.checks)
    assert bad <= 3  # about 0.3% of 100 checks fail at 3 sigma by chance


def test_leaf_fraction_concentrates():
    est = [patree.estimate_w(patree.simulate(2.0, 50_000, stream(7, i))) for i in range(4)]
    frac = np.mean([e.leaf_fraction for e in est])
    assert abs(frac - patree.f_of_w(2.0)) <= 0.01
