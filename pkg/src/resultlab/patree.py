"""Attractiveness-weighted preferential attachment trees.

Each vertex gets label a(v) in {1, w} uniformly at random.  A new vertex
attaches to x with probability A_t(x)/S_t, where A_t(x) is the sum of the
labels of x's neighbors and S_t = sum_x A_t(x).  The leaf fraction L(t)/t
converges to f(w) = 3(w+1)^2 / (2(w+2)(2w+1)), so inverting f estimates w
from the unlabeled tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels

CHECK_EVERY = 10_000
W_MAX = 1e9


class BookkeepingError(AssertionError):
    pass


@dataclass
class WeightedPATree:
    w: float
    is_w: np.ndarray  # uint8 label flags, length t
    parent: np.ndarray  # int64, root has -1
    A: np.ndarray  # attractiveness-weighted degrees
    S: float
    S1: float
    Sw: float
    checks: int = 0

    @property
    def t(self) -> int:
        return int(self.parent.shape[0])

    @property
    def labels(self) -> np.ndarray:
        return np.where(self.is_w.astype(bool), self.w, 1.0)

    @property
    def R(self) -> float:
        return self.Sw / self.S if self.S else math.nan

    @property
    def D(self) -> float:
        return self.Sw - self.S / 2

    @property
    def T(self) -> float:
        return (self.S1 + self.w * self.Sw) / 2

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.parent[1:], minlength=self.t).astype(np.int64)
        deg[1:] += 1
        return deg


def recompute_weights(parent: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """A(v) = sum of neighbor labels, from the parent array alone."""
    t = parent.shape[0]
    A = np.bincount(parent[1:], weights=labels[1:], minlength=t).astype(float)
    A[1:] += labels[parent[1:]]
    return A


def _verify(tree: WeightedPATree, rel: float = 1e-9) -> None:
    lab = tree.labels
    A = recompute_weights(tree.parent, lab)
    scale = max(1.0, float(A.max()) if A.size else 1.0)
    if not np.allclose(A, tree.A, rtol=0, atol=rel * scale):
        raise BookkeepingError("weighted degrees drifted from recomputation")
    S = float(A.sum())
    S1 = float(A[~tree.is_w.astype(bool)].sum())
    Sw = S - S1
    for name, inc, ref in (("S", tree.S, S), ("S1", tree.S1, S1), ("Sw", tree.Sw, Sw)):
        if abs(inc - ref) > rel * max(1.0, abs(ref)):
            raise BookkeepingError(f"running sum {name} drifted: {inc} vs {ref}")
    if abs(tree.S1 + tree.Sw - tree.S) > rel * max(1.0, tree.S):
        raise BookkeepingError("S1 + Sw != S")


def simulate(w: float, t: int, rng: np.random.Generator, check_every: int = CHECK_EVERY, backend: str | None = None) -> WeightedPATree:
    """Grow a tree to ``t`` vertices.  Labels and attachment uniforms are drawn
    up front, so the result depends only on the stream, not the backend."""
    if w < 1:
        raise ValueError("w must be >= 1")
    if t < 1:
        raise ValueError("t must be >= 1")
    kern = get_kernels(backend)
    is_w = rng.integers(0, 2, size=t).astype(np.uint8)
    uniforms = rng.random(t)
    parent = np.full(t, -1, dtype=np.int64)
    A = np.zeros(t, dtype=float)
    sums = np.zeros(3, dtype=float)
    tree = WeightedPATree(float(w), is_w, parent, A, 0.0, 0.0, 0.0)
    done = 1
    while done < t:
        stop = min(t, done + check_every)
        kern.pa_extend(is_w, float(w), parent, A, done, stop, uniforms, sums)
        done = stop
        sub = WeightedPATree(float(w), is_w[:done], parent[:done], A[:done], *sums.tolist())
        _verify(sub)
        tree.checks += 1
    tree.S, tree.S1, tree.Sw = sums.tolist()
    return tree


def state_at(tree: WeightedPATree, s: int) -> WeightedPATree:
    """The process state after ``s`` vertices (a prefix of the full tree)."""
    if not 1 <= s <= tree.t:
        raise ValueError("time out of range")
    parent = tree.parent[:s].copy()
    is_w = tree.is_w[:s].copy()
    lab = np.where(is_w.astype(bool), tree.w, 1.0)
    A = recompute_weights(parent, lab)
    S1 = float(A[~is_w.astype(bool)].sum())
    Sw = float(A[is_w.astype(bool)].sum())
    return WeightedPATree(tree.w, is_w, parent, A, S1 + Sw, S1, Sw)


@dataclass(frozen=True)
class LeafStats:
    L: int
    L1: int
    Lw: int


def _leaf_neighbors(tree: WeightedPATree) -> tuple[np.ndarray, np.ndarray]:
    deg = tree.degrees()
    leaves = np.flatnonzero(deg == 1)
    nbr = tree.parent[leaves].copy()
    if nbr.size and nbr[0] == -1:  # the root is a leaf: its neighbor is its only child
        nbr[0] = int(np.flatnonzero(tree.parent == 0)[0])
    return leaves, nbr


def leaf_stats(tree: WeightedPATree) -> LeafStats:
    if tree.t < 2:
        raise ValueError("leaves undefined for t < 2")
    leaves, nbr = _leaf_neighbors(tree)
    Lw = int(tree.is_w[nbr].sum())
    return LeafStats(int(leaves.size), int(leaves.size) - Lw, Lw)


def f_of_w(w: float) -> float:
    return 3 * (w + 1) ** 2 / (2 * (w + 2) * (2 * w + 1))


def f_of_w_partial(w: float) -> float:
    """Same function written as 3/4 - 1/(2(w+2)) + 1/(4(2w+1))."""
    return 0.75 - 1 / (2 * (w + 2)) + 1 / (4 * (2 * w + 1))


def f_prime(w: float) -> float:
    return 0.5 * (1 / (w + 2) ** 2 - 1 / (2 * w + 1) ** 2)


def leaf_limits(w: float) -> tuple[float, float, float]:
    """Limits of L/t, L1/t and Lw/t."""
    return f_of_w(w), (w + 1) / (2 * (w + 2)), (w + 1) / (2 * (2 * w + 1))


def f_inverse(x: float, tol: float = 1e-12) -> float:
    """Inverse of f on [1, inf), clamped: 1 at or below 2/3, inf at or above 3/4."""
    if x <= 2 / 3:
        return 1.0
    if x >= 0.75 - 1e-12:
        return math.inf
    lo, hi = 1.0, W_MAX
    if f_of_w(hi) <= x:
        return hi
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f_of_w(mid)
        if abs(fm - x) <= tol * 1e-3 or hi - lo <= 1e-15 * hi:
            return mid
        if fm < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class EstimatorResult:
    leaf_fraction: float
    w_hat: float


def estimate_w(tree: WeightedPATree) -> EstimatorResult:
    frac = leaf_stats(tree).L / tree.t
    return EstimatorResult(frac, f_inverse(frac))


@dataclass
class DriftCheck:
    name: str
    exact: float
    closed_form: float
    mc_mean: float
    mc_se: float

    @property
    def exact_ok(self) -> bool:
        return abs(self.exact - self.closed_form) <= 1e-12 * max(1.0, abs(self.closed_form))

    @property
    def mc_ok(self) -> bool:
        return abs(self.mc_mean - self.exact) <= 3 * self.mc_se + 1e-12


@dataclass
class DriftAudit:
    t: int
    checks: list[DriftCheck]
    F1: float
    Fw: float

    @property
    def exact_ok(self) -> bool:
        return all(c.exact_ok for c in self.checks)

    @property
    def mc_ok(self) -> bool:
        return all(c.mc_ok for c in self.checks)


def _outcomes(tree: WeightedPATree) -> dict[str, np.ndarray]:
    """One-step increments for each (parent candidate, new label) pair.

    Arrays have shape (2, t): row 0 for a new label 1, row 1 for label w.
    """
    w = tree.w
    lab = tree.labels
    isw = tree.is_w.astype(bool)
    leaves, nbr = _leaf_neighbors(tree)
    leaf_l1 = np.zeros(tree.t, dtype=bool)
    leaf_lw = np.zeros(tree.t, dtype=bool)
    leaf_l1[leaves[~isw[nbr]]] = True
    leaf_lw[leaves[isw[nbr]]] = True
    a_new = np.array([1.0, w])[:, None]
    aX = lab[None, :]
    dS = a_new + aX
    # parent gains a_new (counts toward Sw if parent is w); new vertex gains a(X)
    dSw = np.where(isw[None, :], a_new, 0.0) + np.array([0.0, 1.0])[:, None] * aX
    dD = dSw - dS / 2
    dL1 = (~isw[None, :]).astype(float) - leaf_l1[None, :]
    dLw = isw[None, :].astype(float) - leaf_lw[None, :]
    dL1 = np.broadcast_to(dL1, dS.shape)
    dLw = np.broadcast_to(dLw, dS.shape)
    return {"dS": dS, "dD": dD, "aX": np.broadcast_to(aX, dS.shape), "dL1": dL1, "dLw": dLw}


def drift_audit(tree: WeightedPATree, samples: int, rng: np.random.Generator) -> DriftAudit:
    """Exact one-step conditional expectations (sum over all parents and both
    labels) against the closed forms, plus a Monte Carlo cross-check."""
    if tree.t < 2:
        raise ValueError("drift undefined for t < 2")
    w = tree.w
    S, S1, Sw = tree.S, tree.S1, tree.Sw
    st = leaf_stats(tree)
    prob = tree.A / S
    mu = (1 + w) / 2
    closed = {
        "dS": tree.D * (w - 1) / S + (w + 1),
        "dD": mu * tree.D / S,
        "aX": 2 * tree.T / S,
        "dL1": (S1 - st.L1) / S,
        "dLw": (Sw - w * st.Lw) / S,
    }
    out = _outcomes(tree)
    cdf = np.cumsum(prob)
    x = np.minimum(np.searchsorted(cdf, rng.random(samples) * cdf[-1], side="right"), tree.t - 1)
    lab = rng.integers(0, 2, size=samples)
    checks = []
    for name, arr in out.items():
        exact = float(0.5 * (arr[0] @ prob + arr[1] @ prob))
        draws = arr[lab, x]
        se = float(draws.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
        checks.append(DriftCheck(name, exact, float(closed[name]), float(draws.mean()), se))
    xf = st.L1 / tree.t
    yf = st.Lw / tree.t
    return DriftAudit(tree.t, checks, 0.5 - xf - xf / (1 + w), 0.5 - yf - w * yf / (1 + w))
