# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Mirrors ``_pykernels`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.string cimport memset
from libc.stdint cimport int64_t, uint64_t, uint8_t, int32_t

cnp.import_array()

BACKEND_NAME = "compiled"

PROFILE_COLUMNS = (
    "S", "P", "Y", "S_enum", "P_enum", "Y_enum", "other_enum",
    "lhs1", "rhs1_x2", "miracle_bad", "telescope", "degree_excess",
)
DEF NPROF = 12


# ---------------------------------------------------------------- trees

cdef struct Scratch:
    int64_t n
    int64_t* deg
    int64_t* indptr
    int64_t* fill
    int64_t* nbr
    int64_t* ext
    int32_t* closed
    int64_t* sub
    int64_t* counts


cdef int scratch_alloc(Scratch* s, int64_t n) nogil:
    cdef int64_t m = n if n > 1 else 1
    s.n = n
    s.deg = <int64_t*> malloc(m * sizeof(int64_t))
    s.indptr = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    s.fill = <int64_t*> malloc(m * sizeof(int64_t))
    s.nbr = <int64_t*> malloc(2 * m * sizeof(int64_t))
    s.ext = <int64_t*> malloc(6 * m * sizeof(int64_t))
    s.closed = <int32_t*> malloc(m * sizeof(int32_t))
    s.sub = <int64_t*> malloc(6 * sizeof(int64_t))
    s.counts = <int64_t*> malloc(4 * sizeof(int64_t))
    if (s.deg == NULL or s.indptr == NULL or s.fill == NULL or s.nbr == NULL
            or s.ext == NULL or s.closed == NULL or s.sub == NULL or s.counts == NULL):
        return -1
    return 0


cdef void scratch_free(Scratch* s) nogil:
    free(s.deg); free(s.indptr); free(s.fill); free(s.nbr)
    free(s.ext); free(s.closed); free(s.sub); free(s.counts)


cdef void build_csr(Scratch* s, const int64_t* eu, const int64_t* ev, int64_t m) nogil:
    cdef int64_t n = s.n, i, a, b
    for i in range(n):
        s.deg[i] = 0
    for i in range(m):
        s.deg[eu[i]] += 1
        s.deg[ev[i]] += 1
    s.indptr[0] = 0
    for i in range(n):
        s.indptr[i + 1] = s.indptr[i] + s.deg[i]
        s.fill[i] = s.indptr[i]
    for i in range(m):
        a = eu[i]
        b = ev[i]
        s.nbr[s.fill[a]] = b
        s.fill[a] += 1
        s.nbr[s.fill[b]] = a
        s.fill[b] += 1


cdef void classify5(Scratch* s) nogil:
    cdef int64_t d[5]
    cdef int64_t i, j, k, v, u, tmp
    for i in range(5):
        v = s.sub[i]
        d[i] = 0
        for k in range(s.indptr[v], s.indptr[v + 1]):
            u = s.nbr[k]
            for j in range(5):
                if s.sub[j] == u:
                    d[i] += 1
                    break
    # insertion sort of five values
    for i in range(1, 5):
        tmp = d[i]
        j = i - 1
        while j >= 0 and d[j] > tmp:
            d[j + 1] = d[j]
            j -= 1
        d[j + 1] = tmp
    if d[0] == 1 and d[1] == 1 and d[2] == 1 and d[3] == 1 and d[4] == 4:
        s.counts[0] += 1
    elif d[0] == 1 and d[1] == 1 and d[2] == 2 and d[3] == 2 and d[4] == 2:
        s.counts[1] += 1
    elif d[0] == 1 and d[1] == 1 and d[2] == 1 and d[3] == 2 and d[4] == 3:
        s.counts[2] += 1
    else:
        s.counts[3] += 1


cdef void esu_extend(Scratch* s, int64_t root, int depth, int64_t* ext, int64_t ext_len) nogil:
    cdef int64_t n = s.n
    cdef int64_t* nxt
    cdef int64_t w, u, k, m, i
    if depth == 5:
        classify5(s)
        return
    nxt = s.ext + depth * n
    while ext_len > 0:
        ext_len -= 1
        w = ext[ext_len]
        for i in range(ext_len):
            nxt[i] = ext[i]
        m = ext_len
        for k in range(s.indptr[w], s.indptr[w + 1]):
            u = s.nbr[k]
            if u > root and s.closed[u] == 0:
                nxt[m] = u
                m += 1
        s.sub[depth] = w
        for k in range(s.indptr[w], s.indptr[w + 1]):
            s.closed[s.nbr[k]] += 1
        esu_extend(s, root, depth + 1, nxt, m)
        for k in range(s.indptr[w], s.indptr[w + 1]):
            s.closed[s.nbr[k]] -= 1


cdef void esu5(Scratch* s) nogil:
    cdef int64_t n = s.n, v, k, m, u
    cdef int64_t* ext0 = s.ext
    s.counts[0] = 0; s.counts[1] = 0; s.counts[2] = 0; s.counts[3] = 0
    for v in range(n):
        s.closed[v] = 0
    for v in range(n):
        s.closed[v] += 1
        m = 0
        for k in range(s.indptr[v], s.indptr[v + 1]):
            u = s.nbr[k]
            s.closed[u] += 1
            if u > v:
                ext0[m] = u
                m += 1
        s.sub[0] = v
        esu_extend(s, v, 1, ext0, m)
        s.closed[v] -= 1
        for k in range(s.indptr[v], s.indptr[v + 1]):
            s.closed[s.nbr[k]] -= 1


cdef inline int64_t binom4(int64_t k) nogil:
    if k < 4:
        return 0
    return k * (k - 1) * (k - 2) * (k - 3) / 24


cdef void profile(Scratch* s, int enumerate_subtrees, int64_t* out) nogil:
    cdef int64_t n = s.n, v, k, u, dv, x, T, sq, local, A, b4, F2, TA, lhs4, rhs4, mm
    cdef int64_t S = 0, P2 = 0, Y = 0, rhs_x2 = 0, bad = 0, tele = 0, excess = 0, P
    for v in range(n):
        dv = s.deg[v]
        T = 0
        sq = 0
        local = 0
        for k in range(s.indptr[v], s.indptr[v + 1]):
            u = s.nbr[k]
            x = s.deg[u] - 1
            T += x
            sq += x * x
            local += dv - s.deg[u]
        A = (dv - 1) * (dv - 2) / 2
        b4 = binom4(dv)
        S += b4
        P2 += T * T - sq
        Y += A * T
        F2 = A * A + dv * (dv - 1) * (dv - 1) - 18 * b4
        TA = T - A
        rhs_x2 += F2 - TA * TA
        lhs4 = 2 * F2 - 2 * TA * TA
        mm = TA - 2
        rhs4 = 10 * local - 12 * (dv - 2) - dv * (dv - 1) * (dv - 3) * (dv - 4) - 2 * mm * (mm - 1)
        if lhs4 != rhs4:
            bad += 1
        tele += local
        excess += dv - 2
    if P2 % 2 == 0:
        P = P2 / 2
    else:
        P = -1
    out[0] = S
    out[1] = P
    out[2] = Y
    if enumerate_subtrees:
        esu5(s)
        out[3] = s.counts[0]; out[4] = s.counts[1]; out[5] = s.counts[2]; out[6] = s.counts[3]
    else:
        out[3] = -1; out[4] = -1; out[5] = -1; out[6] = -1
    out[7] = Y - 9 * S - P
    out[8] = rhs_x2
    out[9] = bad
    out[10] = tele
    out[11] = excess


cdef void decode(const int64_t* seq, int64_t n, int64_t* degree, int64_t* eu, int64_t* ev) nogil:
    cdef int64_t i, k, v, ptr, leaf
    if n <= 1:
        return
    if n == 2:
        eu[0] = 0
        ev[0] = 1
        return
    for i in range(n):
        degree[i] = 1
    for k in range(n - 2):
        degree[seq[k]] += 1
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for k in range(n - 2):
        v = seq[k]
        eu[k] = leaf
        ev[k] = v
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    eu[n - 2] = leaf
    ev[n - 2] = n - 1


def prufer_decode(seq, int64_t n):
    cdef cnp.ndarray[int64_t, ndim=1] s = np.ascontiguousarray(seq, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] eu = np.zeros(max(n - 1, 0), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.zeros(max(n - 1, 0), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] deg = np.zeros(max(n, 1), dtype=np.int64)
    if n >= 2:
        decode(<int64_t*> s.data if s.shape[0] else NULL, n, <int64_t*> deg.data,
               <int64_t*> eu.data, <int64_t*> ev.data)
    return np.stack([eu, ev], axis=1).reshape(max(n - 1, 0), 2)


def tree_profiles(edges_batch, int64_t n, bint enumerate_subtrees=True):
    cdef cnp.ndarray[int64_t, ndim=3] E = np.ascontiguousarray(edges_batch, dtype=np.int64).reshape(-1, max(n - 1, 0), 2)
    cdef int64_t B = E.shape[0], b, i, m = max(n - 1, 0)
    cdef cnp.ndarray[int64_t, ndim=2] out = np.zeros((B, NPROF), dtype=np.int64)
    cdef int64_t* eu = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t* ev = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    cdef Scratch s
    cdef int64_t[:, :, ::1] Ev = E
    cdef int64_t[:, ::1] Ov = out
    if scratch_alloc(&s, n) != 0 or eu == NULL or ev == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(B):
                for i in range(m):
                    eu[i] = Ev[b, i, 0]
                    ev[i] = Ev[b, i, 1]
                build_csr(&s, eu, ev, m)
                profile(&s, enumerate_subtrees, &Ov[b, 0])
    finally:
        scratch_free(&s)
        free(eu)
        free(ev)
    return out


def prufer_profiles(int64_t n, int64_t start, int64_t stop, bint enumerate_subtrees=True):
    cdef int64_t count = stop - start, k, j, idx, L = max(n - 2, 0), m = max(n - 1, 0)
    cdef cnp.ndarray[int64_t, ndim=2] out = np.zeros((count, NPROF), dtype=np.int64)
    cdef int64_t[:, ::1] Ov = out
    cdef int64_t* seq = <int64_t*> malloc((L + 1) * sizeof(int64_t))
    cdef int64_t* degree = <int64_t*> malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* eu = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t* ev = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    cdef Scratch s
    if scratch_alloc(&s, n) != 0 or seq == NULL or degree == NULL or eu == NULL or ev == NULL:
        raise MemoryError()
    try:
        with nogil:
            for k in range(count):
                idx = start + k
                j = L - 1
                while j >= 0:
                    seq[j] = idx % n
                    idx = idx / n
                    j -= 1
                decode(seq, n, degree, eu, ev)
                build_csr(&s, eu, ev, m)
                profile(&s, enumerate_subtrees, &Ov[k, 0])
    finally:
        scratch_free(&s)
        free(seq); free(degree); free(eu); free(ev)
    return out


def esu_counts(int64_t n, edges):
    cdef cnp.ndarray[int64_t, ndim=2] E = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
    cdef int64_t m = E.shape[0], i
    cdef cnp.ndarray[int64_t, ndim=1] eu = np.ascontiguousarray(E[:, 0]) if m else np.zeros(1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.ascontiguousarray(E[:, 1]) if m else np.zeros(1, dtype=np.int64)
    cdef Scratch s
    cdef cnp.ndarray[int64_t, ndim=1] out = np.zeros(4, dtype=np.int64)
    if scratch_alloc(&s, n) != 0:
        raise MemoryError()
    try:
        build_csr(&s, <int64_t*> eu.data, <int64_t*> ev.data, m)
        with nogil:
            esu5(&s)
        for i in range(4):
            out[i] = s.counts[i]
    finally:
        scratch_free(&s)
    return out


# --------------------------------------------------------------- patree

def pa_extend(const uint8_t[::1] is_w, double w, int64_t[::1] parent, double[::1] A,
              int64_t t_from, int64_t t_to, const double[::1] uniforms, double[::1] sums):
    cdef int64_t size = A.shape[0], i, j, k, t, x, pos, nxt, step, top
    cdef double at, ax, rem
    cdef double S = sums[0], S1 = sums[1], Sw = sums[2]
    cdef cnp.ndarray[double, ndim=1] tree_arr = np.zeros(size + 1, dtype=np.float64)
    cdef double[::1] tree = tree_arr
    with nogil:
        for i in range(size):
            j = i + 1
            tree[j] += A[i]
            k = j + (j & -j)
            if k <= size:
                tree[k] += tree[j]
        top = 1
        while top * 2 <= size:
            top *= 2
        for t in range(t_from, t_to):
            at = w if is_w[t] else 1.0
            if t == 1:
                x = 0
            else:
                rem = uniforms[t] * S
                pos = 0
                step = top
                while step:
                    nxt = pos + step
                    if nxt <= size and tree[nxt] <= rem:
                        pos = nxt
                        rem -= tree[nxt]
                    step >>= 1
                x = pos if pos < t else t - 1
            ax = w if is_w[x] else 1.0
            parent[t] = x
            A[x] += at
            j = x + 1
            while j <= size:
                tree[j] += at
                j += j & -j
            A[t] = ax
            j = t + 1
            while j <= size:
                tree[j] += ax
                j += j & -j
            S += at + ax
            if is_w[x]:
                Sw += at
            else:
                S1 += at
            if is_w[t]:
                Sw += ax
            else:
                S1 += ax
    sums[0] = S
    sums[1] = S1
    sums[2] = Sw


# ---------------------------------------------------------- cliquecodes

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef inline int parity64(uint64_t v) nogil:
    return __builtin_popcountll(v) & 1


def clique_scan(int n, adj):
    cdef cnp.ndarray[uint64_t, ndim=2] M = np.ascontiguousarray(adj, dtype=np.uint64).reshape(-1, n if n > 0 else 1)
    cdef uint64_t[:, ::1] Mv = M
    cdef int r = M.shape[0], i, v
    cdef uint64_t k, S = 0, total = (<uint64_t> 1) << n
    cdef int64_t nodd = 0, result = -1
    cdef cnp.ndarray[uint8_t, ndim=1] par_arr = np.zeros(max(r, 1), dtype=np.uint8)
    cdef uint8_t[::1] par = par_arr
    with nogil:
        k = 1
        while k < total:
            v = __builtin_ctzll(k)
            S ^= (<uint64_t> 1) << v
            for i in range(r):
                # parity of edges between v and the rest of S is the same
                # whether v is entering or leaving
                if parity64(Mv[i, v] & S):
                    par[i] ^= 1
                    if par[i]:
                        nodd += 1
                    else:
                        nodd -= 1
            if nodd == 0 and __builtin_popcountll(S) >= 2:
                result = <int64_t> S
                break
            k += 1
    return result


# -------------------------------------------------------------- sieve848

cdef inline int64_t isqrt64(int64_t m) nogil:
    cdef int64_t r = <int64_t> (<double> m) ** 0.5
    while r * r > m:
        r -= 1
    while (r + 1) * (r + 1) <= m:
        r += 1
    return r


def squarefree_flags(values, primes):
    cdef cnp.ndarray[int64_t, ndim=1] V = np.ascontiguousarray(values, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] Pr = np.ascontiguousarray(primes, dtype=np.int64)
    cdef int64_t[::1] Vv = V
    cdef int64_t[::1] Pv = Pr
    cdef int64_t nv = V.shape[0], npr = Pr.shape[0], i, j, m, p, r
    cdef cnp.ndarray[uint8_t, ndim=1] out_arr = np.ones(nv, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    cdef int ok, exhausted, err = 0
    with nogil:
        for i in range(nv):
            m = Vv[i]
            if m < 1:
                err = 1
                break
            ok = 1
            exhausted = 1
            for j in range(npr):
                p = Pv[j]
                if p * p * p > m:
                    exhausted = 0
                    break
                if m % p == 0:
                    m = m / p
                    if m % p == 0:
                        ok = 0
                        exhausted = 0
                        break
            if ok and exhausted and m > 1:
                err = 2
                break
            if ok and m > 1:
                r = isqrt64(m)
                if r * r == m:
                    ok = 0
            out[i] = ok
    if err == 1:
        raise ValueError("squarefree test needs positive integers")
    if err == 2:
        raise ValueError("prime table too short for squarefree test")
    return out_arr
