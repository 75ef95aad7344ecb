# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled outcome engine and octal Grundy DP.

Same contract as misere._engine.pure, with positions packed into 128-bit
keys in an open-addressing table. See that module for semantics.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy, memset

import numpy as np

from misere.errors import EngineWidthError, MemoLimitError

KIND = "compiled"

ctypedef unsigned long long u64

cdef u64 EMPTY_K0 = 0xFFFFFFFFFFFFFFFFULL


cdef inline u64 mix64(u64 x) nogil:
    x ^= x >> 33
    x *= 0xFF51AFD7ED558CCDULL
    x ^= x >> 33
    x *= 0xC4CEB9FE1A85EC53ULL
    x ^= x >> 33
    return x


cdef class OutcomeEngine:
    cdef int h
    cdef long memo_limit
    cdef long max_weight
    cdef public long evals
    # flattened option vectors: opt_vecs[(opt_starts[g]+j)*h + c]
    cdef int* opt_starts
    cdef short* opt_vecs
    cdef int n_opts
    cdef long* weights
    # per-coordinate packing: value goes to word[word_ix] << shift
    cdef int* shift
    cdef int* word_ix
    cdef u64* maxval
    # open-addressing memo: parallel key words and values
    cdef u64* k0
    cdef u64* k1
    cdef unsigned char* vals
    cdef size_t cap
    cdef size_t n_entries
    # frame stack for the iterative search
    cdef short* fvec
    cdef int* fgi
    cdef int* foi
    cdef int depth_cap
    cdef object _opts_py
    cdef object _weights_py

    def __cinit__(self, option_vectors, weights, long memo_limit=10**7,
                  long max_weight=4096):
        cdef int h = len(weights)
        cdef int g, j, c, total, bits, off
        cdef long w
        self.h = h
        self.memo_limit = memo_limit
        self.max_weight = max_weight
        self.evals = 0
        self._opts_py = tuple(
            tuple(tuple(int(x) for x in o) for o in per) for per in option_vectors
        )
        self._weights_py = tuple(int(w0) for w0 in weights)
        if len(option_vectors) != h:
            raise ValueError("one option list per component required")
        self.weights = <long*> malloc(h * sizeof(long))
        for g in range(h):
            w = int(weights[g])
            if w < 1:
                raise ValueError("weights must be positive")
            self.weights[g] = w
        total = 0
        for per in self._opts_py:
            total += len(per)
        self.n_opts = total
        self.opt_starts = <int*> malloc((h + 1) * sizeof(int))
        self.opt_vecs = <short*> malloc(max(1, total * h) * sizeof(short))
        total = 0
        for g in range(h):
            self.opt_starts[g] = total
            for o in self._opts_py[g]:
                if len(o) != h:
                    raise ValueError("option vectors must have one entry per component")
                ow = 0
                for c in range(h):
                    self.opt_vecs[total * h + c] = <short> o[c]
                    ow += o[c] * self.weights[c]
                if ow >= self.weights[g]:
                    raise ValueError("option must have smaller total birthday")
                total += 1
        self.opt_starts[h] = total
        # packing layout: coordinate g holds values up to max_weight//w_g
        self.shift = <int*> malloc(h * sizeof(int))
        self.word_ix = <int*> malloc(h * sizeof(int))
        self.maxval = <u64*> malloc(h * sizeof(u64))
        off = 0
        for g in range(h):
            self.maxval[g] = <u64> (max_weight // self.weights[g])
            bits = 1
            while (<u64> 1 << bits) <= self.maxval[g]:
                bits += 1
            if off < 64 and off + bits > 64:
                off = 64
            if off + bits > 128:
                raise EngineWidthError(
                    f"cannot pack {h} coordinates with max_weight {max_weight} "
                    f"into 128-bit keys"
                )
            self.word_ix[g] = 1 if off >= 64 else 0
            self.shift[g] = off - 64 * self.word_ix[g]
            off += bits
        self.cap = 1 << 16
        self.k0 = <u64*> malloc(self.cap * sizeof(u64))
        self.k1 = <u64*> malloc(self.cap * sizeof(u64))
        self.vals = <unsigned char*> malloc(self.cap)
        memset(self.vals, 0xFF, self.cap)
        for j in range(<int> self.cap):
            self.k0[j] = EMPTY_K0
        self.n_entries = 0
        self.depth_cap = <int> max_weight + 4
        self.fvec = <short*> malloc(self.depth_cap * h * sizeof(short))
        self.fgi = <int*> malloc(self.depth_cap * sizeof(int))
        self.foi = <int*> malloc(self.depth_cap * sizeof(int))

    def __dealloc__(self):
        free(self.opt_starts)
        free(self.opt_vecs)
        free(self.weights)
        free(self.shift)
        free(self.word_ix)
        free(self.maxval)
        free(self.k0)
        free(self.k1)
        free(self.vals)
        free(self.fvec)
        free(self.fgi)
        free(self.foi)

    @property
    def memo_entries(self):
        return self.n_entries

    @property
    def options(self):
        return self._opts_py

    def weight(self, vec):
        return sum(int(x) * w for x, w in zip(vec, self._weights_py))

    cdef inline void _pack(self, short* v, u64* w0, u64* w1) nogil:
        cdef u64 a = 0, b = 0
        cdef int g
        for g in range(self.h):
            if self.word_ix[g]:
                b |= (<u64> v[g]) << self.shift[g]
            else:
                a |= (<u64> v[g]) << self.shift[g]
        w0[0] = a
        w1[0] = b

    cdef inline long _find(self, u64 a, u64 b) nogil:
        # slot of (a,b), or -(slot+1) of the empty slot to insert into
        cdef size_t mask = self.cap - 1
        cdef size_t i = <size_t> (mix64(a ^ mix64(b)) & mask)
        while True:
            if self.k0[i] == EMPTY_K0 and self.vals[i] == 0xFF:
                return -(<long> i) - 1
            if self.k0[i] == a and self.k1[i] == b:
                return <long> i
            i = (i + 1) & mask

    cdef int _grow(self) except -1:
        cdef size_t newcap = self.cap * 2
        cdef u64* nk0 = <u64*> malloc(newcap * sizeof(u64))
        cdef u64* nk1 = <u64*> malloc(newcap * sizeof(u64))
        cdef unsigned char* nvals = <unsigned char*> malloc(newcap)
        cdef size_t i, j, mask
        if nk0 == NULL or nk1 == NULL or nvals == NULL:
            raise MemoryError()
        memset(nvals, 0xFF, newcap)
        for i in range(newcap):
            nk0[i] = EMPTY_K0
        mask = newcap - 1
        for i in range(self.cap):
            if not (self.k0[i] == EMPTY_K0 and self.vals[i] == 0xFF):
                j = <size_t> (mix64(self.k0[i] ^ mix64(self.k1[i])) & mask)
                while nvals[j] != 0xFF or nk0[j] != EMPTY_K0:
                    j = (j + 1) & mask
                nk0[j] = self.k0[i]
                nk1[j] = self.k1[i]
                nvals[j] = self.vals[i]
        free(self.k0)
        free(self.k1)
        free(self.vals)
        self.k0 = nk0
        self.k1 = nk1
        self.vals = nvals
        self.cap = newcap
        return 0

    cdef int _insert(self, u64 a, u64 b, unsigned char val) except -1:
        cdef long slot = self._find(a, b)
        if slot >= 0:
            self.vals[slot] = val
            return 0
        slot = -slot - 1
        self.k0[slot] = a
        self.k1[slot] = b
        self.vals[slot] = val
        self.n_entries += 1
        if self.n_entries > <size_t> self.memo_limit:
            raise MemoLimitError(self.n_entries)
        if self.n_entries * 10 >= self.cap * 7:
            self._grow()
        return 0

    cdef int _outcome(self, short* root) except -1:
        cdef int h = self.h
        cdef int depth = 0
        cdef int g, oi, j, c, res, nz
        cdef long slot
        cdef u64 a, b
        cdef short* cur
        cdef short* child
        memcpy(self.fvec, root, h * sizeof(short))
        self.fgi[0] = 0
        self.foi[0] = 0
        res = -1
        while depth >= 0:
            cur = self.fvec + depth * h
            self._pack(cur, &a, &b)
            slot = self._find(a, b)
            if slot >= 0:
                res = self.vals[slot]
                depth -= 1
                continue
            nz = 0
            for c in range(h):
                if cur[c]:
                    nz = 1
                    break
            if not nz:
                self._insert(a, b, 0)
                res = 0
                depth -= 1
                continue
            # scan moves from the saved cursor
            g = self.fgi[depth]
            oi = self.foi[depth]
            res = -1
            while g < h:
                if cur[g] == 0:
                    g += 1
                    oi = 0
                    continue
                if oi >= self.opt_starts[g + 1] - self.opt_starts[g]:
                    g += 1
                    oi = 0
                    continue
                if depth + 1 >= self.depth_cap:
                    raise RuntimeError("engine frame stack overflow")
                child = self.fvec + (depth + 1) * h
                memcpy(child, cur, h * sizeof(short))
                child[g] -= 1
                j = (self.opt_starts[g] + oi) * h
                for c in range(h):
                    child[c] += self.opt_vecs[j + c]
                self._pack(child, &a, &b)
                slot = self._find(a, b)
                if slot < 0:
                    # unresolved child: remember the cursor, descend
                    self.fgi[depth] = g
                    self.foi[depth] = oi
                    self.fgi[depth + 1] = 0
                    self.foi[depth + 1] = 0
                    depth += 1
                    res = -2
                    break
                if self.vals[slot] == 1:
                    res = 0
                    break
                oi += 1
            if res == -2:
                continue
            if res == -1:
                res = 1
            self._pack(cur, &a, &b)
            self._insert(a, b, <unsigned char> res)
            self.evals += 1
            depth -= 1
        return res

    def outcome(self, vec):
        """1 if the position is a misere P-position, else 0."""
        cdef int i, h = self.h
        cdef long wsum = 0
        cdef short* buf = <short*> malloc(h * sizeof(short))
        try:
            if len(vec) != h:
                raise ValueError("vector length mismatch")
            for i in range(h):
                x = int(vec[i])
                if x < 0:
                    raise ValueError("exponents must be natural numbers")
                buf[i] = <short> x
                wsum += x * self.weights[i]
            if wsum > self.max_weight:
                raise ValueError("query exceeds the engine's max_weight bound")
            return self._outcome(buf)
        finally:
            free(buf)

    def outcomes(self, pts):
        """Vector of outcomes (uint8) for an ``n x h`` array of positions."""
        pts_arr = np.ascontiguousarray(pts, dtype=np.int64)
        if pts_arr.ndim != 2 or pts_arr.shape[1] != self.h:
            raise ValueError("expected an n x h array")
        cdef long[:, :] rows = pts_arr
        cdef int n = pts_arr.shape[0]
        out = np.empty(n, dtype=np.uint8)
        cdef unsigned char[:] ov = out
        cdef short* buf = <short*> malloc(self.h * sizeof(short))
        cdef int i, c
        cdef long wsum
        try:
            for i in range(n):
                wsum = 0
                for c in range(self.h):
                    if rows[i, c] < 0:
                        raise ValueError("exponents must be natural numbers")
                    buf[c] = <short> rows[i, c]
                    wsum += rows[i, c] * self.weights[c]
                if wsum > self.max_weight:
                    raise ValueError("query exceeds the engine's max_weight bound")
                ov[i] = <unsigned char> self._outcome(buf)
            return out
        finally:
            free(buf)

    def dump(self):
        """Memoized positions and outcomes as parallel arrays."""
        cdef size_t i
        cdef int g
        n = self.n_entries
        pts = np.empty((n, self.h), dtype=np.int32)
        vals = np.empty(n, dtype=np.uint8)
        cdef int[:, :] pv = pts
        cdef unsigned char[:] vv = vals
        cdef size_t row = 0
        for i in range(self.cap):
            if not (self.k0[i] == EMPTY_K0 and self.vals[i] == 0xFF):
                for g in range(self.h):
                    if self.word_ix[g]:
                        pv[row, g] = <int> ((self.k1[i] >> self.shift[g]) & self.maxval_mask(g))
                    else:
                        pv[row, g] = <int> ((self.k0[i] >> self.shift[g]) & self.maxval_mask(g))
                vv[row] = self.vals[i]
                row += 1
        order = np.lexsort(pts.T[::-1])
        return pts[order], vals[order]

    cdef inline u64 maxval_mask(self, int g) nogil:
        cdef u64 m = 1
        while m <= self.maxval[g]:
            m <<= 1
        return m - 1

    def load(self, pts, vals):
        """Seed the memo from a dump; returns the number of entries taken."""
        cdef int taken = 0
        cdef u64 a, b
        pts_arr = np.ascontiguousarray(pts, dtype=np.int64)
        vals_arr = np.ascontiguousarray(vals, dtype=np.uint8)
        cdef long[:, :] rows = pts_arr
        cdef unsigned char[:] vv = vals_arr
        cdef short* buf = <short*> malloc(self.h * sizeof(short))
        cdef int i, c
        cdef long wsum
        try:
            if pts_arr.ndim != 2 or pts_arr.shape[1] != self.h:
                return 0
            for i in range(pts_arr.shape[0]):
                wsum = 0
                for c in range(self.h):
                    buf[c] = <short> rows[i, c]
                    wsum += rows[i, c] * self.weights[c]
                if wsum > self.max_weight:
                    continue
                self._pack(buf, &a, &b)
                self._insert(a, b, vv[i])
                taken += 1
            return taken
        finally:
            free(buf)


def octal_grundy(digits, long n_max):
    """Grundy values G[0..n_max] of the octal game with the given digits."""
    cdef int k = len(digits) - 1
    g_arr = np.zeros(n_max + 1, dtype=np.uint32)
    cdef unsigned int[:] g = g_arr
    if n_max == 0:
        return g_arr
    cdef int bits = 0
    cdef long t = n_max
    while t:
        bits += 1
        t >>= 1
    cdef long cap = (<long> 1 << (bits + 1)) + 2
    cdef long* stamp = <long*> calloc(cap, sizeof(long))
    cdef long* digs = <long*> malloc((k + 1) * sizeof(long))
    cdef long n, r, m, a, v, d
    cdef unsigned int x
    if stamp == NULL or digs == NULL:
        raise MemoryError()
    try:
        # calloc zeros double as "never stamped" since n >= 1 below
        for r in range(k + 1):
            digs[r] = int(digits[r])
        for n in range(1, n_max + 1):
            for r in range(1, (n if n < k else k) + 1):
                d = digs[r]
                if d & 1 and n == r:
                    stamp[0] = n
                if d & 2 and n - r >= 1:
                    stamp[g[n - r]] = n
                if d & 4 and n - r >= 2:
                    m = n - r
                    for a in range(1, m // 2 + 1):
                        x = g[a] ^ g[m - a]
                        stamp[x] = n
            v = 0
            while stamp[v] == n:
                v += 1
            g[n] = <unsigned int> v
    finally:
        free(stamp)
        free(digs)
    return g_arr
