"""Induced 5-vertex subtree counts of finite trees.

Three shapes occur as 5-vertex induced subtrees: the star S (degrees
4,1,1,1,1), the path P (2,2,2,1,1) and the remaining "wye" Y (3,2,1,1,1).
The closed forms below express all three through per-vertex statistics; the
ESU enumeration in the kernels is the independent brute-force oracle.

All identity checks run on Python integers (arbitrary precision), so there
is no overflow regime to guard.  The batch kernels use int64 and are only
called below ``KERNEL_N_LIMIT``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, NamedTuple

import numpy as np

from ._backend import get_kernels

KERNEL_N_LIMIT = 1000
ORACLE_N_LIMIT = 64
ENUM_N_LIMIT = 9


class Tree:
    """Undirected tree on vertices ``0..n-1``, validated on construction."""

    __slots__ = ("n", "edges", "adjacency")

    def __init__(self, n: int, edges, validate: bool = True):
        if n < 1:
            raise ValueError("not a tree: need at least one vertex")
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.n = int(n)
        self.edges = arr
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in arr.tolist():
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError("not a tree: vertex out of range")
            adj[a].append(b)
            adj[b].append(a)
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)
        if validate:
            self._validate()

    def _validate(self) -> None:
        if self.edges.shape[0] != self.n - 1:
            raise ValueError("not a tree: edge count must be n - 1")
        for v, nbrs in enumerate(self.adjacency):
            if v in nbrs:
                raise ValueError("not a tree: self-loop")
            if len(set(nbrs)) != len(nbrs):
                raise ValueError("not a tree: duplicate edge")
        seen = [False] * self.n
        seen[0] = True
        todo = [0]
        while todo:
            v = todo.pop()
            for u in self.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    todo.append(u)
        if not all(seen):
            raise ValueError("not a tree: disconnected")

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, edges={self.edges.tolist()})"


def path_tree(n: int) -> Tree:
    return Tree(n, [(i, i + 1) for i in range(n - 1)])


def star_tree(n: int) -> Tree:
    return Tree(n, [(0, i) for i in range(1, n)])


class SubtreeCounts(NamedTuple):
    S: int
    P: int
    Y: int

    @property
    def total(self) -> int:
        return self.S + self.P + self.Y


@dataclass(frozen=True)
class VertexStats:
    d: int
    x: int
    T: int
    A: int


def vertex_stats(tree: Tree) -> list[VertexStats]:
    deg = tree.degrees()
    out = []
    for v in range(tree.n):
        d = deg[v]
        T = sum(deg[u] - 1 for u in tree.adjacency[v])
        # (d-1)(d-2)/2 as a polynomial: 0 for d in {1, 2}, 1 at d = 0 (n = 1 only)
        out.append(VertexStats(d, d - 1, T, (d - 1) * (d - 2) // 2))
    return out


def counts_by_formula(tree: Tree) -> SubtreeCounts:
    deg = tree.degrees()
    S = 0
    twice_P = 0
    Y = 0
    for v, st in enumerate(vertex_stats(tree)):
        S += comb(st.d, 4)
        twice_P += st.T * st.T - sum((deg[u] - 1) ** 2 for u in tree.adjacency[v])
        Y += st.A * st.T
    if twice_P % 2:
        raise ArithmeticError("path count numerator is odd")
    return SubtreeCounts(S, twice_P // 2, Y)


def counts_by_enumeration(tree: Tree, max_n: int = ORACLE_N_LIMIT) -> SubtreeCounts:
    """Brute-force counts: every connected 5-vertex induced subgraph is visited
    once (ESU enumeration) and classified by its degree multiset."""
    if tree.n > max_n:
        raise ValueError(f"oracle scale exceeded: n={tree.n} > {max_n}")
    if tree.n < 5:
        return SubtreeCounts(0, 0, 0)
    s, p, y, other = get_kernels().esu_counts(tree.n, tree.edges).tolist()
    if other:
        raise ArithmeticError("induced subgraph of a tree is not one of the three shapes")
    return SubtreeCounts(s, p, y)


_SHAPES = {(1, 1, 1, 1, 4): 0, (1, 1, 2, 2, 2): 1, (1, 1, 1, 2, 3): 2}


def counts_by_subsets(tree: Tree, max_n: int = 24) -> SubtreeCounts:
    """Literal scan of all C(n, 5) subsets; a second oracle for small trees."""
    if tree.n > max_n:
        raise ValueError(f"oracle scale exceeded: n={tree.n} > {max_n}")
    counts = [0, 0, 0]
    nbr = [set(a) for a in tree.adjacency]
    for sub in itertools.combinations(range(tree.n), 5):
        members = set(sub)
        degs = tuple(sorted(len(nbr[v] & members) for v in sub))
        if sum(degs) != 8:
            continue  # 4 edges on 5 vertices of a forest means connected
        counts[_SHAPES[degs]] += 1
    return SubtreeCounts(*counts)


def _F(k: int) -> Fraction:
    a = Fraction((k - 1) * (k - 2), 2)
    return a * a / 2 + Fraction(k * (k - 1) ** 2, 2) - 9 * comb(k, 4)


@dataclass(frozen=True)
class IdentityResiduals:
    lhs1: int
    rhs1: int
    miracle_lhs: tuple[Fraction, ...]
    lhs2_terms: tuple[Fraction, ...]

    @property
    def identity_ok(self) -> bool:
        return self.lhs1 == self.rhs1

    @property
    def miracle_ok(self) -> bool:
        return self.miracle_lhs == self.lhs2_terms


def identity_residuals(tree: Tree) -> IdentityResiduals:
    """Both sides of Y - 9S - P = sum_v [F(d_v) - (T_v - A_v)^2 / 2] and, per
    vertex, both sides of the local identity

        F(d) - (T-A)^2/2 = 5/2 sum_{u~v}(d_v - d_u) - 3(d_v - 2)
                           - d(d-1)(d-3)(d-4)/4 - binom(T-A-2, 2)

    with binom(m, 2) = m(m-1)/2 for every integer m.  Exact rationals.
    """
    counts = counts_by_formula(tree)
    deg = tree.degrees()
    lhs1 = counts.Y - 9 * counts.S - counts.P
    total = Fraction(0)
    local_lhs = []
    local_rhs = []
    for v, st in enumerate(vertex_stats(tree)):
        ta = st.T - st.A
        term = _F(st.d) - Fraction(ta * ta, 2)
        total += term
        local_lhs.append(term)
        tele = sum(st.d - deg[u] for u in tree.adjacency[v])
        m = ta - 2
        rhs = (
            Fraction(5 * tele, 2)
            - 3 * (st.d - 2)
            - Fraction(st.d * (st.d - 1) * (st.d - 3) * (st.d - 4), 4)
            - Fraction(m * (m - 1), 2)
        )
        local_rhs.append(rhs)
    if total.denominator != 1:
        raise ArithmeticError("identity right-hand side is not an integer")
    return IdentityResiduals(lhs1, int(total), tuple(local_lhs), tuple(local_rhs))


@dataclass(frozen=True)
class FamilyCoefficients:
    C: int
    coef_Y: int
    coef_P: int
    coef_S: int


def family_coefficients(C: int) -> FamilyCoefficients:
    if C < 1:
        raise ValueError("C must be >= 1")
    return FamilyCoefficients(
        C,
        C * (2 * C * C + 7 * C + 7),
        C * (C + 1) * (C * C + 3 * C + 4),
        24 * (C + 1) * (C + 2),
    )


def family_lhs(C: int, counts: SubtreeCounts) -> int:
    f = family_coefficients(C)
    return f.coef_Y * counts.Y - f.coef_P * counts.P - f.coef_S * counts.S


def prufer_sequence(index: int, n: int) -> list[int]:
    """Base-n digits of ``index`` (most significant first), length n - 2."""
    seq = [0] * max(n - 2, 0)
    for j in range(len(seq) - 1, -1, -1):
        index, seq[j] = divmod(index, n)
    return seq


def tree_from_prufer(seq, n: int) -> Tree:
    return Tree(n, get_kernels().prufer_decode(np.asarray(seq, dtype=np.int64), n), validate=False)


def labeled_tree_count(n: int) -> int:
    return 1 if n <= 2 else n ** (n - 2)


def enumerate_labeled_trees(n: int) -> Iterator[Tree]:
    if not 1 <= n <= ENUM_N_LIMIT:
        raise ValueError(f"enumeration scale exceeded: n={n}")
    for idx in range(labeled_tree_count(n)):
        yield tree_from_prufer(prufer_sequence(idx, n), n)


def random_tree(n: int, rng: np.random.Generator) -> Tree:
    """Uniform labeled tree (uniform Prüfer sequence)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    seq = rng.integers(0, n, size=max(n - 2, 0))
    return tree_from_prufer(seq, n)


def random_degree_tree(n: int, k: int, rng: np.random.Generator) -> Tree:
    """Uniform labeled tree among those whose internal vertices all have degree
    ``k``, except one vertex absorbing the remainder of ``n - 2`` mod ``k - 1``."""
    if n < 3 or k < 2:
        return random_tree(n, rng)
    internal, rest = divmod(n - 2, k - 1)
    multiset = [v for v in range(internal) for _ in range(k - 1)]
    if rest:
        multiset += [internal] * rest
    labels = rng.permutation(n)
    seq = labels[np.asarray(multiset, dtype=np.int64)]
    return tree_from_prufer(rng.permutation(seq), n)


def random_caterpillar(n: int, k: int, rng: np.random.Generator) -> Tree:
    """Caterpillar whose spine vertices have degree ``k``; leftover leaves go to
    random spine vertices.  Vertex labels are shuffled."""
    if n < 3 or k < 2:
        return random_tree(n, rng)
    spine, rest = divmod(n - 2, k - 1)
    spine = max(spine, 1)
    legs = [k - 2] * spine
    legs[0] += 1
    legs[-1] += 1
    if spine == 1:
        legs[0] = n - 1  # a single spine vertex: the caterpillar is a star
    extra = n - spine - sum(legs)
    for v in rng.integers(0, spine, size=extra):
        legs[int(v)] += 1
    labels = rng.permutation(n)
    edges = [(labels[i], labels[i + 1]) for i in range(spine - 1)]
    nxt = spine
    for i, count in enumerate(legs):
        for _ in range(count):
            edges.append((labels[i], labels[nxt]))
            nxt += 1
    return Tree(n, edges, validate=False)


# ---------------------------------------------------------------- sweeps

PROFILE_COLUMNS = (
    "S",
    "P",
    "Y",
    "S_enum",
    "P_enum",
    "Y_enum",
    "other_enum",
    "lhs1",
    "rhs1_x2",
    "miracle_bad",
    "telescope",
    "degree_excess",
)


def profile_labeled_range(n: int, start: int, stop: int, enumerate_subtrees: bool = True, backend: str | None = None) -> np.ndarray:
    """Per-tree profile rows (see ``PROFILE_COLUMNS``) for Prüfer indices in ``[start, stop)``."""
    return get_kernels(backend).prufer_profiles(n, start, stop, enumerate_subtrees)


def profile_tree(tree: Tree, enumerate_subtrees: bool = True, backend: str | None = None) -> np.ndarray:
    if tree.n > KERNEL_N_LIMIT:
        raise ValueError(f"kernel scale exceeded: n={tree.n}")
    if enumerate_subtrees and tree.n > ORACLE_N_LIMIT:
        raise ValueError(f"oracle scale exceeded: n={tree.n} > {ORACLE_N_LIMIT}")
    return get_kernels(backend).tree_profiles(tree.edges[None, :, :], tree.n, enumerate_subtrees)[0]


@dataclass(frozen=True)
class ProfileCheck:
    trees: int
    oracle_mismatches: int
    thm1_violations: int
    thm2_violations: int
    identity_failures: int
    miracle_failures: int
    telescope_failures: int
    degree_failures: int
    max_thm1: int
    max_thm2: int


def check_profiles(prof: np.ndarray, with_oracle: bool = True) -> ProfileCheck:
    """Summarize a block of profile rows against every identity and inequality."""
    prof = np.asarray(prof, dtype=np.int64)
    S, P, Y = prof[:, 0], prof[:, 1], prof[:, 2]
    thm1 = Y - 9 * S - P
    thm2 = 29 * Y - 42 * P - 144 * S
    if with_oracle:
        oracle_bad = int(np.count_nonzero(np.any(prof[:, 0:3] != prof[:, 3:6], axis=1) | (prof[:, 6] != 0)))
    else:
        oracle_bad = 0
    return ProfileCheck(
        trees=int(prof.shape[0]),
        oracle_mismatches=oracle_bad,
        thm1_violations=int(np.count_nonzero(thm1 > 6)),
        thm2_violations=int(np.count_nonzero(thm2 > 504)),
        identity_failures=int(np.count_nonzero((2 * prof[:, 7] != prof[:, 8]) | (P < 0))),
        miracle_failures=int(np.count_nonzero(prof[:, 9])),
        telescope_failures=int(np.count_nonzero(prof[:, 10])),
        degree_failures=int(np.count_nonzero(prof[:, 11] != -2)),
        max_thm1=int(thm1.max()) if thm1.size else 0,
        max_thm2=int(thm2.max()) if thm2.size else 0,
    )


@dataclass(frozen=True)
class FamilyHit:
    value: int
    n: int
    generator: str
    degree_sequence: tuple[int, ...]


GENERATORS = ("uniform", "degree", "caterpillar")


def family_trial_tree(trial: int, n: int, rng: np.random.Generator) -> tuple[str, Tree]:
    """The tree examined at ``trial`` of the family search.

    Trials cycle through three random generators: uniform labeled trees,
    uniform trees with a prescribed internal degree, and caterpillars with a
    prescribed spine degree (degrees drawn from 3..7).  Uniform trees alone
    essentially never show large family values; the constrained generators
    probe the sparse high-degree region where the inequality is tight.
    """
    kind = GENERATORS[trial % len(GENERATORS)]
    if kind == "uniform":
        return kind, random_tree(n, rng)
    k = int(rng.integers(3, 8))
    if kind == "degree":
        return kind, random_degree_tree(n, k, rng)
    return kind, random_caterpillar(n, k, rng)


def family_value(C: int, tree: Tree) -> int:
    return family_lhs(C, counts_by_formula(tree))
