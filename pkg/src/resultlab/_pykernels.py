"""Pure-Python/numpy versions of the hot loops.

Used when the compiled ``_kernels`` extension is unavailable or when
``RESULTLAB_BACKEND=python`` is set.  Every function here has the same
signature and, for the integer kernels, bit-identical output as its compiled
counterpart.  Random draws are always made by the caller and passed in, so the
backend never influences which random numbers are consumed.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Column layout of the tree profile kernels.
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
N_PROFILE = len(PROFILE_COLUMNS)


# ---------------------------------------------------------------- trees


def prufer_decode(seq, n: int) -> np.ndarray:
    """Decode a Prüfer sequence into an ``(n-1, 2)`` edge array (linear time)."""
    edges = np.zeros((max(n - 1, 0), 2), dtype=np.int64)
    if n <= 1:
        return edges
    if n == 2:
        edges[0] = (0, 1)
        return edges
    seq = [int(v) for v in seq]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for k, v in enumerate(seq):
        edges[k, 0] = leaf
        edges[k, 1] = v
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges[n - 2, 0] = leaf
    edges[n - 2, 1] = n - 1
    return edges


def _adjacency(n, edges):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        a = int(a)
        b = int(b)
        adj[a].append(b)
        adj[b].append(a)
    return adj


def _binom4(k):
    return k * (k - 1) * (k - 2) * (k - 3) // 24 if k >= 4 else 0


def _esu5(adj, n):
    """Connected 5-vertex induced subgraphs by ESU, classified by degree multiset."""
    counts = [0, 0, 0, 0]  # S, P, Y, other

    def classify(sub):
        members = set(sub)
        degs = sorted(sum(1 for u in adj[v] if u in members) for v in sub)
        if degs == [1, 1, 1, 1, 4]:
            counts[0] += 1
        elif degs == [1, 1, 2, 2, 2]:
            counts[1] += 1
        elif degs == [1, 1, 1, 2, 3]:
            counts[2] += 1
        else:
            counts[3] += 1

    def extend(sub, closed, ext, root):
        if len(sub) == 5:
            classify(sub)
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            grown = ext + [u for u in adj[w] if u > root and u not in closed]
            extend(sub + [w], closed | set(adj[w]), grown, root)

    for v in range(n):
        closed = {v} | set(adj[v])
        extend([v], closed, [u for u in adj[v] if u > v], v)
    return counts


def _profile(n, edges, enumerate_subtrees=True):
    out = [0] * N_PROFILE
    adj = _adjacency(n, edges)
    d = [len(a) for a in adj]
    S = 0
    P2 = 0
    Y = 0
    rhs_x2 = 0
    bad = 0
    tele = 0
    excess = 0
    for v in range(n):
        dv = d[v]
        T = 0
        sq = 0
        local = 0
        for u in adj[v]:
            x = d[u] - 1
            T += x
            sq += x * x
            local += dv - d[u]
        A = (dv - 1) * (dv - 2) // 2
        b4 = _binom4(dv)
        S += b4
        P2 += T * T - sq
        Y += A * T
        F2 = A * A + dv * (dv - 1) * (dv - 1) - 18 * b4
        TA = T - A
        rhs_x2 += F2 - TA * TA
        lhs4 = 2 * F2 - 2 * TA * TA
        m = TA - 2
        rhs4 = (
            10 * local
            - 12 * (dv - 2)
            - dv * (dv - 1) * (dv - 3) * (dv - 4)
            - 2 * m * (m - 1)
        )
        if lhs4 != rhs4:
            bad += 1
        tele += local
        excess += dv - 2
    out[0] = S
    out[1] = P2 // 2 if P2 % 2 == 0 else -1
    out[2] = Y
    if enumerate_subtrees:
        out[3:7] = _esu5(adj, n)
    else:
        out[3:7] = [-1, -1, -1, -1]
    out[7] = Y - 9 * S - out[1]
    out[8] = rhs_x2
    out[9] = bad
    out[10] = tele
    out[11] = excess
    return out


def tree_profiles(edges_batch, n: int, enumerate_subtrees: bool = True) -> np.ndarray:
    """Profile a batch of trees given as an ``(B, n-1, 2)`` edge array."""
    edges_batch = np.asarray(edges_batch, dtype=np.int64)
    B = edges_batch.shape[0]
    out = np.zeros((B, N_PROFILE), dtype=np.int64)
    for b in range(B):
        out[b] = _profile(n, edges_batch[b].tolist(), enumerate_subtrees)
    return out


def prufer_profiles(n: int, start: int, stop: int, enumerate_subtrees: bool = True) -> np.ndarray:
    """Profile the trees with Prüfer indices ``start <= i < stop`` (base-n digits, most significant first)."""
    count = stop - start
    out = np.zeros((count, N_PROFILE), dtype=np.int64)
    L = max(n - 2, 0)
    for k in range(count):
        idx = start + k
        seq = [0] * L
        for j in range(L - 1, -1, -1):
            seq[j] = idx % n
            idx //= n
        out[k] = _profile(n, prufer_decode(seq, n).tolist(), enumerate_subtrees)
    return out


def esu_counts(n: int, edges) -> np.ndarray:
    """(S, P, Y, other) counts of connected induced 5-vertex subgraphs."""
    adj = _adjacency(n, np.asarray(edges, dtype=np.int64).tolist())
    return np.array(_esu5(adj, n), dtype=np.int64)


# --------------------------------------------------------------- patree


def pa_extend(is_w, w, parent, A, t_from, t_to, uniforms, sums):
    """Grow the weighted attachment tree from ``t_from`` to ``t_to`` vertices.

    ``A`` and ``parent`` are updated in place; ``sums`` holds the running
    ``(S, S1, Sw)`` and is updated in place as well.  Vertex ``t`` is attached
    using ``uniforms[t]``; vertex 1 always attaches to the root.
    """
    size = A.shape[0]
    tree = [0.0] * (size + 1)
    Al = A.tolist()
    for i in range(size):
        j = i + 1
        tree[j] += Al[i]
        k = j + (j & -j)
        if k <= size:
            tree[k] += tree[j]
    top = 1
    while top * 2 <= size:
        top *= 2
    wl = is_w.tolist() if hasattr(is_w, "tolist") else list(is_w)
    ul = uniforms.tolist() if hasattr(uniforms, "tolist") else list(uniforms)
    S, S1, Sw = float(sums[0]), float(sums[1]), float(sums[2])
    w = float(w)
    for t in range(t_from, t_to):
        at = w if wl[t] else 1.0
        if t == 1:
            x = 0
        else:
            rem = ul[t] * S
            pos = 0
            step = top
            while step:
                nxt = pos + step
                if nxt <= size and tree[nxt] <= rem:
                    pos = nxt
                    rem -= tree[nxt]
                step >>= 1
            x = pos if pos < t else t - 1
        ax = w if wl[x] else 1.0
        parent[t] = x
        Al[x] += at
        j = x + 1
        while j <= size:
            tree[j] += at
            j += j & -j
        Al[t] = ax
        j = t + 1
        while j <= size:
            tree[j] += ax
            j += j & -j
        S += at + ax
        if wl[x]:
            Sw += at
        else:
            S1 += at
        if wl[t]:
            Sw += ax
        else:
            S1 += ax
    A[:] = Al
    sums[0] = S
    sums[1] = S1
    sums[2] = Sw


# ---------------------------------------------------------- cliquecodes


def clique_scan(n: int, adj) -> int:
    """First vertex mask (reflected Gray order, popcount >= 2) with even parity
    against every check, or -1 if there is none.

    ``adj[i, v]`` is the neighbor bitmask of vertex ``v`` in check graph ``i``.
    """
    adj = np.asarray(adj, dtype=np.uint64)
    r = adj.shape[0]
    size = 1 << n
    if size <= 2:
        return -1
    any_odd = np.zeros(size, dtype=bool)
    for i in range(r):
        par = np.zeros(size, dtype=np.uint8)
        for b in range(n):
            lo = np.arange(1 << b, dtype=np.uint64)
            flip = (np.bitwise_count(lo & adj[i, b]) & 1).astype(np.uint8)
            par[1 << b : 1 << (b + 1)] = par[: 1 << b] ^ flip
        any_odd |= par.astype(bool)
    k = np.arange(size, dtype=np.int64)
    gray = k ^ (k >> 1)
    bad = ~any_odd[gray] & (np.bitwise_count(gray.astype(np.uint64)) >= 2)
    hit = np.flatnonzero(bad)
    return int(gray[hit[0]]) if hit.size else -1


# -------------------------------------------------------------- sieve848


def squarefree_flags(values, primes) -> np.ndarray:
    """1 where the value is squarefree, else 0.

    ``primes`` must contain every prime up to the cube root of ``max(values)``.
    Primes are divided out while ``p^3`` is at most the remaining cofactor; what
    is left then has at most two prime factors, so it is non-squarefree only
    when it is a perfect square.
    """
    vals = [int(v) for v in np.asarray(values, dtype=np.int64)]
    plist = [int(p) for p in np.asarray(primes, dtype=np.int64)]
    out = np.ones(len(vals), dtype=np.uint8)
    for i, m in enumerate(vals):
        if m < 1:
            raise ValueError("squarefree test needs positive integers")
        ok = True
        exhausted = True
        for p in plist:
            if p * p * p > m:
                exhausted = False
                break
            if m % p == 0:
                m //= p
                if m % p == 0:
                    ok = False
                    exhausted = False
                    break
        if ok and exhausted and m > 1:
            raise ValueError("prime table too short for squarefree test")
        if ok and m > 1:
            r = _isqrt(m)
            if r * r == m:
                ok = False
        out[i] = 1 if ok else 0
    return out


def _isqrt(m):
    import math

    return math.isqrt(m)
