# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fock-basis kernels.

States are ranked with the combinatorial number system for multisets, so no
hash lookup is needed when mapping a lowered state back to its index.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef cnp.int64_t[:, ::1] _multichoose_table(int n_slots, int n_max):
    # mc[k, r] = C(k + r - 1, r), k in 0..n_slots, r in 0..n_max
    cdef cnp.int64_t[:, ::1] mc = np.zeros((n_slots + 1, n_max + 1), dtype=np.int64)
    cdef int k, r
    for r in range(n_max + 1):
        mc[0, r] = 1 if r == 0 else 0
    for k in range(1, n_slots + 1):
        mc[k, 0] = 1
        for r in range(1, n_max + 1):
            mc[k, r] = mc[k, r - 1] * (k + r - 1) // r
    return mc


cdef class _Ranker:
    cdef int n_slots, n_max
    cdef cnp.int64_t[:, ::1] cum
    cdef cnp.int64_t[::1] offset

    def __init__(self, int n_slots, int n_max):
        cdef cnp.int64_t[:, ::1] mc = _multichoose_table(n_slots, n_max)
        cdef int r, u
        self.n_slots = n_slots
        self.n_max = n_max
        # cum[r, u] = sum_{v < u} mc[n_slots - v, r]
        self.cum = np.zeros((n_max + 1, n_slots + 1), dtype=np.int64)
        for r in range(n_max + 1):
            for u in range(n_slots):
                self.cum[r, u + 1] = self.cum[r, u] + mc[n_slots - u, r]
        self.offset = np.zeros(n_max + 2, dtype=np.int64)
        for r in range(n_max + 1):
            self.offset[r + 1] = self.offset[r] + mc[n_slots, r]

    cdef cnp.int64_t rank(self, cnp.int64_t* t, int n, int skip) nogil:
        # rank of t with position `skip` removed (skip = -1 keeps all)
        cdef int m = n - 1 if skip >= 0 else n
        cdef cnp.int64_t total = self.offset[m]
        cdef int i, pos = 0
        cdef cnp.int64_t prev = 0, u
        for i in range(n):
            if i == skip:
                continue
            u = t[i]
            total += self.cum[m - pos - 1, u] - self.cum[m - pos - 1, prev]
            prev = u
            pos += 1
        return total


def annihilation_entries(cnp.int64_t[:, ::1] tuples, cnp.int64_t[::1] level, int n_slots, int n_max):
    cdef Py_ssize_t dim = tuples.shape[0]
    cdef Py_ssize_t cap = dim * max(n_max, 1)
    cdef cnp.int64_t[::1] rows = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] cols = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] slots = np.empty(cap, dtype=np.int64)
    cdef double[::1] vals = np.empty(cap, dtype=np.float64)
    cdef _Ranker rk = _Ranker(n_slots, n_max)
    cdef Py_ssize_t j, k = 0
    cdef int i, c, n
    cdef cnp.int64_t s
    for j in range(dim):
        n = level[j]
        i = 0
        while i < n:
            s = tuples[j, i]
            c = 1
            while i + c < n and tuples[j, i + c] == s:
                c += 1
            rows[k] = rk.rank(&tuples[j, 0], n, i)
            cols[k] = j
            slots[k] = s
            vals[k] = sqrt(c)
            k += 1
            i += c
    return (np.asarray(rows[:k]), np.asarray(cols[:k]),
            np.asarray(slots[:k]), np.asarray(vals[:k]))


def rank_states(cnp.int64_t[:, ::1] tuples, cnp.int64_t[::1] level, int n_slots, int n_max):
    cdef Py_ssize_t dim = tuples.shape[0]
    cdef cnp.int64_t[::1] out = np.empty(dim, dtype=np.int64)
    cdef _Ranker rk = _Ranker(n_slots, n_max)
    cdef Py_ssize_t j
    for j in range(dim):
        out[j] = rk.rank(&tuples[j, 0], level[j], -1)
    return np.asarray(out)
