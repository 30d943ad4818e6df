"""Binary codes on the edges of K_n that contain no clique indicator.

A code is given by parity checks; each check is the edge set of a graph G_i
on [n], stored as a Python int bitmask over the C(n, 2) edge coordinates in
lexicographic order (i < j).  The code avoids cliques iff every vertex set S
with |S| >= 2 induces an odd number of edges in at least one G_i.

Vertices are 0-based internally; the block construction below is written in
the 1-based labels it is usually stated in.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from ._backend import get_kernels

SCAN_N_LIMIT = 24


def edge_index(i: int, j: int, n: int) -> int:
    """Coordinate of edge {i, j} (0-based, i != j) in lexicographic order."""
    if i > j:
        i, j = j, i
    if i == j or not 0 <= i < j < n:
        raise ValueError("invalid edge")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def edge_list(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def edges_to_bits(edges: Iterable[tuple[int, int]], n: int) -> int:
    bits = 0
    for i, j in edges:
        bits ^= 1 << edge_index(i, j, n)
    return bits


def clique_indicator(S: Iterable[int], n: int) -> int:
    S = sorted(set(S))
    return edges_to_bits(itertools.combinations(S, 2), n)


def mask_to_set(mask: int) -> list[int]:
    return [v for v in range(mask.bit_length()) if mask >> v & 1]


@dataclass(frozen=True)
class ParityCheckFamily:
    n: int
    checks: tuple[int, ...]
    construction: str = "explicit"

    def __post_init__(self) -> None:
        m = comb(self.n, 2)
        for c in self.checks:
            if c < 0 or c >> m:
                raise ValueError("check longer than C(n, 2) coordinates")

    @property
    def r(self) -> int:
        return len(self.checks)

    def adjacency(self) -> np.ndarray:
        """``adj[i, v]`` = neighbor bitmask of vertex v in check graph i."""
        adj = np.zeros((max(self.r, 1), max(self.n, 1)), dtype=np.uint64)
        pairs = edge_list(self.n)
        for i, c in enumerate(self.checks):
            for k, (a, b) in enumerate(pairs):
                if c >> k & 1:
                    adj[i, a] |= np.uint64(1 << b)
                    adj[i, b] |= np.uint64(1 << a)
        return adj[: self.r]

    def with_check(self, check: int) -> "ParityCheckFamily":
        return ParityCheckFamily(self.n, self.checks + (check,), self.construction)


def parity(check: int, S_bits: int) -> int:
    return (check & S_bits).bit_count() & 1


def alon_checks(n: int) -> ParityCheckFamily:
    """(n-1)/2 checks for odd n: block B_i = {2i-1, 2i}, and G_i is the union of
    the triangles on B_i with apex j for every j > 2i."""
    if n % 2 == 0:
        raise ValueError("n even: use even_checks")
    if n < 3:
        raise ValueError("n must be >= 3")
    checks = []
    for i in range(1, (n - 1) // 2 + 1):
        a, b = 2 * i - 1, 2 * i
        edges = [(a - 1, b - 1)]
        for j in range(2 * i + 1, n + 1):
            edges += [(a - 1, j - 1), (b - 1, j - 1)]
        checks.append(edges_to_bits(edges, n))
    return ParityCheckFamily(n, tuple(checks), "block-triangles")


def embed(family: ParityCheckFamily, n: int) -> ParityCheckFamily:
    """The same check graphs viewed on a larger vertex set."""
    old = edge_list(family.n)
    out = []
    for c in family.checks:
        out.append(edges_to_bits([old[k] for k in range(len(old)) if c >> k & 1], n))
    return ParityCheckFamily(n, tuple(out), family.construction)


def restrict(family: ParityCheckFamily, n: int) -> ParityCheckFamily:
    """Check graphs restricted to vertices [n]."""
    old = edge_list(family.n)
    out = []
    for c in family.checks:
        out.append(edges_to_bits([(a, b) for k, (a, b) in enumerate(old) if c >> k & 1 and b < n], n))
    return ParityCheckFamily(n, tuple(out), family.construction)


def _all_parities(family: ParityCheckFamily) -> np.ndarray:
    """Boolean (2^n,) array: True where some check has odd parity on that mask."""
    n = family.n
    size = 1 << n
    any_odd = np.zeros(size, dtype=bool)
    for row in family.adjacency():
        par = np.zeros(size, dtype=np.uint8)
        for b in range(n):
            lo = np.arange(1 << b, dtype=np.uint64)
            par[1 << b : 1 << (b + 1)] = par[: 1 << b] ^ (np.bitwise_count(lo & row[b]) & 1).astype(np.uint8)
        any_odd |= par.astype(bool)
    return any_odd


def uncovered_sets(family: ParityCheckFamily) -> list[int]:
    """Vertex masks (|S| >= 2) on which every check has even parity."""
    odd = _all_parities(family)
    masks = np.arange(1 << family.n, dtype=np.uint64)
    bad = ~odd & (np.bitwise_count(masks) >= 2)
    return [int(m) for m in np.flatnonzero(bad)]


def solve_gf2(rows: Sequence[int], rhs: Sequence[int], nvars: int) -> int | None:
    """Some x with popcount(row & x) = rhs mod 2 for every row, or None."""
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, row, rhs)
    for r, b in zip(rows, rhs):
        for bit, prow, pb in pivots:
            if r >> bit & 1:
                r ^= prow
                b ^= pb
        if r == 0:
            if b:
                return None
            continue
        bit = r.bit_length() - 1
        # keep rows fully reduced so back substitution is a single pass
        pivots = [(pb_, pr ^ r, pbb ^ b) if pr >> bit & 1 else (pb_, pr, pbb) for pb_, pr, pbb in pivots]
        pivots.append((bit, r, b))
    x = 0
    for bit, r, b in pivots:
        if b:
            x |= 1 << bit
    if x >> nvars:
        raise ArithmeticError("solution outside the coordinate range")
    return x


class EvenSearchError(RuntimeError):
    pass


def even_checks(n: int) -> ParityCheckFamily:
    """n/2 verified checks for even n.

    The odd construction on the first n-1 vertices covers every S except a few
    sets; one more check must have odd parity on exactly those, which is a
    small linear system over GF(2).  If that fails, the odd construction for
    n+1 restricted to [n] is tried.  Nothing unverified is ever returned.
    """
    if n % 2 or n < 2:
        raise ValueError("n must be even and >= 2")
    if n == 2:
        fam = ParityCheckFamily(2, (1,), "single-edge")
        if verify_clique_avoiding(fam)[0]:
            return fam
        raise EvenSearchError("no verified even-n family found within search budget")
    candidates = []
    base = embed(alon_checks(n - 1), n)
    uncovered = uncovered_sets(base)
    extra = solve_gf2([clique_indicator(mask_to_set(m), n) for m in uncovered], [1] * len(uncovered), comb(n, 2))
    if extra is not None:
        fam = base.with_check(extra)
        candidates.append(ParityCheckFamily(n, fam.checks, "block-triangles+gf2-augmentation"))
    fam = restrict(alon_checks(n + 1), n)
    candidates.append(ParityCheckFamily(n, fam.checks, "block-triangles-restricted"))
    for fam in candidates:
        if fam.r == n // 2 and verify_clique_avoiding(fam)[0]:
            return fam
    raise EvenSearchError("no verified even-n family found within search budget")


def checks_for(n: int) -> ParityCheckFamily:
    return alon_checks(n) if n % 2 else even_checks(n)


def verify_clique_avoiding(family: ParityCheckFamily, backend: str | None = None) -> tuple[bool, int | None]:
    """(True, None) if every |S| >= 2 is caught by some check, else (False,
    first failing vertex mask in reflected Gray-code order)."""
    if family.n > SCAN_N_LIMIT:
        raise ValueError(f"scale exceeded: n={family.n} > {SCAN_N_LIMIT}")
    if family.n < 2:
        return True, None
    if family.r == 0:
        return False, 0b11  # Gray order visits {0, 1} first among sets of size 2
    mask = get_kernels(backend).clique_scan(family.n, family.adjacency())
    return (True, None) if mask < 0 else (False, int(mask))


def verify_naive(family: ParityCheckFamily) -> bool:
    """Edge-by-edge check over all subsets; slow reference."""
    pairs = edge_list(family.n)
    for size in range(2, family.n + 1):
        for S in itertools.combinations(range(family.n), size):
            inside = set(S)
            caught = False
            for c in family.checks:
                cnt = sum(1 for k, (a, b) in enumerate(pairs) if c >> k & 1 and a in inside and b in inside)
                if cnt % 2:
                    caught = True
                    break
            if not caught:
                return False
    return True


def _signatures(n: int, vectors: np.ndarray) -> np.ndarray:
    """For each check vector, the bitmask (over sets |S| >= 2) of odd parities."""
    subsets = [S for k in range(2, n + 1) for S in itertools.combinations(range(n), k)]
    chi = [clique_indicator(S, n) for S in subsets]
    sig = np.zeros(vectors.shape[0], dtype=np.uint64)
    for idx, c in enumerate(chi):
        par = np.bitwise_count(vectors & np.uint64(c)) & 1
        sig |= par.astype(np.uint64) << np.uint64(idx)
    return sig, len(subsets)


PROVEN_NO = "proven_no"
FOUND_YES = "found_yes"
INCONCLUSIVE = "inconclusive"


def min_codim_exists(n: int, r: int, budget: int | None = None, rng: np.random.Generator | None = None) -> str:
    """Is there a clique-avoiding family of ``r`` checks on K_n?

    Exhaustive for n <= 5 and r <= 2: each nonzero check vector is reduced to
    its signature (which sets it catches) and r-sets of vectors are scanned.
    Elsewhere a random search with an explicit budget can only find examples.
    """
    if n < 2 or r < 0:
        raise ValueError("need n >= 2 and r >= 0")
    m = comb(n, 2)
    if n <= 5 and r <= 2:
        vecs = np.arange(1, 1 << m, dtype=np.uint64)
        sig, k = _signatures(n, vecs)
        full = np.uint64((1 << k) - 1)
        if r == 0:
            return PROVEN_NO
        if np.any(sig == full):
            return FOUND_YES
        if r == 1:
            return PROVEN_NO
        uniq = np.unique(sig)
        for s in uniq:
            if np.any((uniq | s) == full):
                return FOUND_YES
        return PROVEN_NO
    if budget is None:
        raise ValueError("need budget outside the exhaustive range")
    rng = rng or np.random.default_rng(0)
    for _ in range(budget):
        if random_code_trial(n, r, rng):
            return FOUND_YES
    return INCONCLUSIVE


def random_family(n: int, r: int, rng: np.random.Generator) -> ParityCheckFamily:
    m = comb(n, 2)
    checks = []
    for _ in range(r):
        bits = rng.integers(0, 2, size=m)
        checks.append(int(sum(int(b) << k for k, b in enumerate(bits))))
    return ParityCheckFamily(n, tuple(checks), "random")


def random_code_trial(n: int, r: int, rng: np.random.Generator) -> bool:
    if n > SCAN_N_LIMIT:
        raise ValueError(f"scale exceeded: n={n} > {SCAN_N_LIMIT}")
    return verify_clique_avoiding(random_family(n, r, rng))[0]
