"""Pure-Python Fock-basis kernels (fallback when the compiled core is absent)."""

from itertools import combinations_with_replacement
from math import comb, sqrt

import numpy as np


def multichoose(k, r):
    return comb(k + r - 1, r) if k > 0 else int(r == 0)


def basis_size(n_slots, n_max):
    return sum(multichoose(n_slots, n) for n in range(n_max + 1))


def enumerate_states(n_slots, n_max):
    """Occupied-slot tuples in graded lexicographic order.

    Returns ``(tuples, level)``: ``tuples[j, :level[j]]`` lists the occupied
    slots of state ``j`` in non-decreasing order; the rest is padded with -1.
    """
    dim = basis_size(n_slots, n_max)
    tuples = np.full((dim, max(n_max, 1)), -1, dtype=np.int64)
    level = np.zeros(dim, dtype=np.int64)
    j = 0
    for n in range(n_max + 1):
        for combo in combinations_with_replacement(range(n_slots), n):
            tuples[j, :n] = combo
            level[j] = n
            j += 1
    return tuples, level


def annihilation_entries(tuples, level, n_slots, n_max):
    """Matrix entries of every slot annihilator on the truncated basis.

    Returns ``(rows, cols, slots, vals)``: ``b_slot[rows, cols] = vals``.
    """
    index = {tuple(t[:n]): j for j, (t, n) in enumerate(zip(tuples.tolist(), level.tolist()))}
    rows, cols, slots, vals = [], [], [], []
    for j, (t, n) in enumerate(zip(tuples.tolist(), level.tolist())):
        t = t[:n]
        i = 0
        while i < n:
            s = t[i]
            c = 1
            while i + c < n and t[i + c] == s:
                c += 1
            rows.append(index[tuple(t[:i] + t[i + 1:])])
            cols.append(j)
            slots.append(s)
            vals.append(sqrt(c))
            i += c
    return (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
            np.array(slots, dtype=np.int64), np.array(vals, dtype=float))


def rank_states(tuples, level, n_slots, n_max):
    """Basis index of each tuple (inverse of :func:`enumerate_states`)."""
    index = {}
    all_t, all_l = enumerate_states(n_slots, n_max)
    for j, (t, n) in enumerate(zip(all_t.tolist(), all_l.tolist())):
        index[tuple(t[:n])] = j
    return np.array([index[tuple(t[:n])] for t, n in zip(tuples.tolist(), level.tolist())],
                    dtype=np.int64)
