"""Squarefree sieve constants and small-N checks for sets A with ab + 1 never
squarefree (a = b allowed).

Euler products are truncated at P_max with a rigorous tail bracket: for
factors 1 - c/p^2 the missing tail lies in [1 - c/P_max, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ._backend import get_kernels

ETA = 0.002
THRESHOLD = 0.04 - ETA


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


FILTERS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "all": lambda p: np.ones(p.shape, dtype=bool),
    "p!=5": lambda p: p != 5,
    "p!=2,5": lambda p: (p != 2) & (p != 5),
    "p=1mod4": lambda p: p % 4 == 1,
    "p=1mod4,p>=13": lambda p: (p % 4 == 1) & (p >= 13),
}


@dataclass(frozen=True)
class TruncatedProduct:
    prime_filter: str
    c: float
    P_max: int
    value: float
    tail_bound: float
    rounding: float  # allowance for floating-point error in ``value``

    @property
    def lower(self) -> float:
        """Rigorous lower bound on the infinite product."""
        return self.value - self.tail_bound - self.rounding

    @property
    def upper(self) -> float:
        return self.value + self.rounding

    def brackets(self, x: float) -> bool:
        return self.lower <= x <= self.upper


_PRIME_CACHE: dict[int, np.ndarray] = {}


def _primes_cached(n: int) -> np.ndarray:
    if n not in _PRIME_CACHE:
        _PRIME_CACHE[n] = primes_up_to(n)
    return _PRIME_CACHE[n]


def truncated_product(prime_filter: str, c: float, P_max: int) -> TruncatedProduct:
    """prod over filtered primes p <= P_max of (1 - c/p^2)."""
    if P_max < 100:
        raise ValueError("P_max must be >= 100")
    if prime_filter not in FILTERS:
        raise ValueError(f"unknown prime filter {prime_filter!r}")
    p = _primes_cached(P_max)
    p = p[FILTERS[prime_filter](p)].astype(float)
    logs = np.log1p(-c / (p * p))
    value = math.exp(math.fsum(logs.tolist()))
    rounding = 8 * (len(p) + 10) * np.finfo(float).eps * value
    # sum_{m > P} c/m^2 < c/P bounds the missing factors from below
    return TruncatedProduct(prime_filter, c, P_max, value, c / P_max, float(rounding))


@dataclass(frozen=True)
class ConstantRow:
    constant_name: str
    value: float
    tail_bound: float
    paper_digits: str
    ok: bool
    bound: float  # the rigorous side used for the comparison


class ConstantVerificationError(ArithmeticError):
    pass


def _constants(P_max: int) -> dict[str, TruncatedProduct]:
    return {
        "all": truncated_product("all", 1.0, P_max),
        "p!=5": truncated_product("p!=5", 1.0, P_max),
        "p!=2,5": truncated_product("p!=2,5", 1.0, P_max),
        "1mod4": truncated_product("p=1mod4", 2.0, P_max),
        "tail": truncated_product("p=1mod4,p>=13", 2.0, P_max),
    }


def constants_table(P_max: int = 10_000_000, strict: bool = True) -> list[ConstantRow]:
    """The recorded 4-digit constants, each checked against its bracket."""
    k = _constants(P_max)
    rows = []

    def ge(name, tp, digits):
        rows.append(ConstantRow(name, tp.value, tp.tail_bound, ">= " + digits, tp.lower >= float(digits), tp.lower))

    def one_minus_le(name, tp, digits):
        up = 1 - tp.lower
        rows.append(ConstantRow(name, 1 - tp.value, tp.tail_bound, "<= " + digits, up <= float(digits), up))

    ge("prod_p(1-1/p^2)=6/pi^2", k["all"], "0.6079")
    ge("prod_{p!=5}(1-1/p^2)=25/(4pi^2)", k["p!=5"], "0.6332")
    ge("prod_{p!=2,5}(1-1/p^2)=25/(3pi^2)", k["p!=2,5"], "0.8443")
    one_minus_le("1-6/pi^2", k["all"], "0.3921")
    one_minus_le("1-25/(4pi^2)", k["p!=5"], "0.3668")
    one_minus_le("1-25/(3pi^2)", k["p!=2,5"], "0.1557")
    one_minus_le("1-prod_{p=1(4),p>=13}(1-2/p^2)", k["tail"], "0.0274")
    tp = k["1mod4"]
    lo, hi = 1 - tp.upper, 1 - tp.lower
    rows.append(ConstantRow("1-prod_{p=1(4)}(1-2/p^2)", 1 - tp.value, tp.tail_bound, "0.10515...", 0.10515 <= lo and hi < 0.10516, hi))
    if strict and not all(r.ok for r in rows):
        bad = [r.constant_name for r in rows if not r.ok]
        raise ConstantVerificationError(f"constant verification failed: {bad}")
    return rows


def closed_forms() -> dict[str, float]:
    return {"all": 6 / math.pi**2, "p!=5": 25 / (4 * math.pi**2), "p!=2,5": 25 / (3 * math.pi**2)}


@dataclass(frozen=True)
class CaseBound:
    name: str
    terms: tuple[float, ...]  # each rounded up to 4 decimals
    total: float
    paper_terms: tuple[float, ...]
    paper_total: float
    ok: bool


class CaseBoundError(ArithmeticError):
    pass


def _ceil4(x: float) -> float:
    return math.ceil(x * 10_000 - 1e-9) / 10_000


def case_bounds(P_max: int = 10_000_000) -> list[CaseBound]:
    """Recompute the four case bounds from rigorous upper bounds on the
    constituent constants, rounding each term up to 4 decimals."""
    constants_table(P_max)
    k = _constants(P_max)
    tau = 1 - k["tail"].lower
    c4 = 1 - k["p!=5"].lower
    c25 = 1 - k["p!=2,5"].lower
    spec = [
        ("even element outside the 7/18 classes", [23 / 25 * tau, 2 / 25 * c25], [0.0252, 0.0125], 0.0377),
        ("odd outside, 7/18 classes all odd", [23 / 50 * tau, 1 / 50, 1 / 50 * c25], [0.0126, 0.0200, 0.0032], 0.0358),
        ("odd outside, an even 7/18 element", [23 / 50 * tau, 1 / 25 * c4, 1 / 25 * c25], [0.0126, 0.0147, 0.0063], 0.0336),
        ("only the 7/18 classes, both used", [2 / 25 * c4], [0.0294], 0.0294),
    ]
    out = []
    for name, raw, paper_terms, paper_total in spec:
        terms = tuple(_ceil4(t) for t in raw)
        total = round(sum(terms), 4)
        ok = terms == tuple(paper_terms) and total == paper_total and total < THRESHOLD
        out.append(CaseBound(name, terms, total, tuple(paper_terms), paper_total, ok))
    for cb in out:
        if cb.total >= THRESHOLD:
            raise CaseBoundError(f"case bound failed: {cb.name}")
    return out


# ----------------------------------------------------- squarefree counting


def squarefree_flags(values: np.ndarray, primes: np.ndarray | None = None, backend: str | None = None) -> np.ndarray:
    """Boolean array, True where the value is squarefree (trial division)."""
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return np.zeros(0, dtype=bool)
    if primes is None:
        primes = _trial_primes(int(values.max()))
    return get_kernels(backend).squarefree_flags(values, primes).astype(bool)


def _trial_primes(top: int, only_1mod4: bool = False) -> np.ndarray:
    """Primes (optionally 2 and p = 1 mod 4 only) ending past the cube root of
    ``top``, so the trial-division kernel never runs out."""
    bound = max(16, int(round(top ** (1 / 3))) + 2)
    while True:
        p = _primes_cached(bound)
        if only_1mod4:
            p = p[(p == 2) | (p % 4 == 1)]
        if int(p[-1]) ** 3 > top:
            return p
        bound *= 2


def is_squarefree(m: int) -> bool:
    """Plain trial division; independent of the kernels."""
    if m < 1:
        raise ValueError("need m >= 1")
    p = 2
    while p * p <= m:
        if m % (p * p) == 0:
            return False
        if m % p == 0:
            m //= p
        p += 1
    return True


def _sqrt_minus_one_mod_p(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ArithmeticError("no non-residue found")


def _roots_mod_p2(p: int) -> tuple[int, int]:
    """The two solutions of x^2 = -1 (mod p^2) for a prime p = 1 (mod 4)."""
    r = _sqrt_minus_one_mod_p(p)
    p2 = p * p
    # Hensel: r' = r - (r^2 + 1) / (2r) mod p^2
    r = (r - (r * r + 1) * pow(2 * r, -1, p2)) % p2
    return r, p2 - r


def diag_nonsquarefree_trial(N: int, backend: str | None = None) -> np.ndarray:
    """Boolean mask over a = 1..N: a^2 + 1 not squarefree (trial division).

    Only p = 2 and primes p = 1 (mod 4) can divide a^2 + 1, so only those are
    tried; the perfect-square test on the cofactor is unaffected.
    """
    a = np.arange(1, N + 1, dtype=np.int64)
    vals = a * a + 1
    return ~squarefree_flags(vals, _trial_primes(N * N + 1, only_1mod4=True), backend)


def diag_nonsquarefree_sieve(N: int) -> np.ndarray:
    """Same mask by marking a = root (mod p^2) for each p = 1 (mod 4), p <= N."""
    hit = np.zeros(N + 1, dtype=bool)
    for p in _primes_cached(max(N, 2)).tolist():
        if p % 4 != 1:
            continue
        p2 = p * p
        for r in _roots_mod_p2(p):
            start = r if r > 0 else p2
            hit[start::p2] = True
    return hit[1:]


def diag_density(N: int, method: str = "auto", backend: str | None = None) -> float:
    """Fraction of a in [1, N] with a^2 + 1 not squarefree."""
    if not 1 <= N <= 10_000_000:
        raise ValueError("need 1 <= N <= 10^7")
    if method == "auto":
        method = "trial" if N <= 1_000_000 else "sieve"
    if method == "trial":
        mask = diag_nonsquarefree_trial(N, backend)
    elif method == "sieve":
        mask = diag_nonsquarefree_sieve(N)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(np.count_nonzero(mask)) / N


# ------------------------------------------------------ extremal search


@dataclass
class ExtremalResult:
    N: int
    construction_size: int
    best_found: int
    witness: list[int]
    vertices: int
    witness_valid: bool
    equals_construction: bool


def compatibility_graph(N: int, backend: str | None = None) -> tuple[list[int], list[int]]:
    """Vertices a <= N with a^2 + 1 not squarefree, and adjacency bitsets
    (indices into the vertex list) for pairs with ab + 1 not squarefree."""
    verts = (np.flatnonzero(diag_nonsquarefree_trial(N, backend)) + 1).astype(np.int64)
    k = len(verts)
    adj = [0] * k
    if k:
        iu, ju = np.triu_indices(k, 1)
        prod = verts[iu] * verts[ju] + 1
        bad = ~squarefree_flags(prod, backend=backend)
        for i, j in zip(iu[bad].tolist(), ju[bad].tolist()):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return verts.tolist(), adj


def _color_order(P: int, adj: list[int]) -> tuple[list[int], list[int]]:
    order: list[int] = []
    bounds: list[int] = []
    color = 0
    uncolored = P
    while uncolored:
        color += 1
        Q = uncolored
        while Q:
            low = Q & -Q
            v = low.bit_length() - 1
            Q &= ~adj[v] & ~low
            uncolored &= ~low
            order.append(v)
            bounds.append(color)
    return order, bounds


def max_clique(adj: list[int], initial: Sequence[int] = ()) -> list[int]:
    """Maximum clique by branch and bound with a greedy-coloring bound.

    ``initial`` (a known clique) only seeds the incumbent for pruning.
    """
    best = list(initial)

    def expand(R: list[int], P: int) -> None:
        nonlocal best
        order, bounds = _color_order(P, adj)
        for v, b in zip(reversed(order), reversed(bounds)):
            if len(R) + b <= len(best):
                return
            NP = P & adj[v]
            if NP:
                expand(R + [v], NP)
            elif len(R) + 1 > len(best):
                best = R + [v]
            P &= ~(1 << v)

    k = len(adj)
    expand([], (1 << k) - 1 if k else 0)
    return sorted(best)


def pairwise_valid(A: Sequence[int]) -> bool:
    """ab + 1 not squarefree for all a, b in A (including a = b)."""
    A = list(A)
    for i, a in enumerate(A):
        for b in A[i:]:
            if is_squarefree(a * b + 1):
                return False
    return True


def extremal_search(N: int, backend: str | None = None) -> ExtremalResult:
    if not 1 <= N <= 2000:
        raise ValueError("need 1 <= N <= 2000")
    construction = list(range(7, N + 1, 25))
    verts, adj = compatibility_graph(N, backend)
    pos = {a: i for i, a in enumerate(verts)}
    seed = [pos[a] for a in construction if a in pos]
    if len(seed) != len(construction):
        raise ArithmeticError("construction element missing from the graph")
    clique = max_clique(adj, seed)
    witness = [verts[i] for i in clique]
    return ExtremalResult(
        N,
        len(construction),
        len(witness),
        witness,
        len(verts),
        pairwise_valid(witness),
        len(witness) == len(construction),
    )


# ---------------------------------------------------------- sieve lemma


class ResidueSystemError(ValueError):
    def __init__(self, reason: str):
        super().__init__(f"bad residue system: {reason}")


@dataclass
class SieveCheck:
    N: int
    count: int
    main_term: float

    @property
    def error(self) -> float:
        return abs(self.count - self.main_term)


def sieve_lemma_check(N: int, q: int, t: int, residues: Mapping[int, Sequence[int]]) -> SieveCheck:
    """Count n in [1, N], n = t (mod q), with n mod p^2 in R_p for some p,
    against (N/q)(1 - prod_p (1 - |R_p|/p^2))."""
    if q < 1:
        raise ResidueSystemError("q must be positive")
    for p, R in residues.items():
        if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            raise ResidueSystemError(f"{p} is not prime")
        if len(set(R)) != len(R) or len(R) > 2:
            raise ResidueSystemError(f"R_{p} must hold at most 2 distinct residues")
        if any(not 0 <= r < p * p for r in R):
            raise ResidueSystemError(f"residue out of range mod {p}^2")
        if R and math.gcd(p, q) != 1:
            raise ResidueSystemError(f"R_{p} must be empty since p divides q")
    n = np.arange(1, N + 1, dtype=np.int64)
    n = n[(n - t) % q == 0]
    hit = np.zeros(n.shape, dtype=bool)
    prod = 1.0
    for p, R in sorted(residues.items()):
        if not R:
            continue
        hit |= np.isin(n % (p * p), np.asarray(R, dtype=np.int64))
        prod *= 1 - len(R) / (p * p)
    main = (N / q) * (1 - prod) if any(residues.values()) else 0.0
    return SieveCheck(N, int(np.count_nonzero(hit)), main)


def sieve_lemma_ladder(N0: int, doublings: int, q: int, t: int, residues: Mapping[int, Sequence[int]]) -> list[SieveCheck]:
    return [sieve_lemma_check(N0 * 2**k, q, t, residues) for k in range(doublings + 1)]
