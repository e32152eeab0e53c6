# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled hot kernel: Levenshtein distance over integer id sequences.

Semantics must stay identical to plan2text._kernels_py; the test suite
cross-checks both backends.
"""

from libc.stdlib cimport free, malloc

BACKEND = "cython"


cpdef int levenshtein_ids(a, b) except -1:
    """Unit-cost edit distance (insert/delete/substitute) between id sequences."""
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0:
        return <int>lb
    if lb == 0:
        return <int>la

    cdef long *bv = <long *>malloc(lb * sizeof(long))
    cdef long *prev = <long *>malloc((lb + 1) * sizeof(long))
    cdef long *curr = <long *>malloc((lb + 1) * sizeof(long))
    if bv == NULL or prev == NULL or curr == NULL:
        if bv != NULL:
            free(bv)
        if prev != NULL:
            free(prev)
        if curr != NULL:
            free(curr)
        raise MemoryError()

    cdef Py_ssize_t i, j
    cdef long ai, cost, best, tmp
    cdef long *swap
    try:
        for j in range(lb):
            bv[j] = b[j]
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            ai = a[i - 1]
            curr[0] = i
            for j in range(1, lb + 1):
                cost = 0 if bv[j - 1] == ai else 1
                best = prev[j - 1] + cost
                tmp = prev[j] + 1
                if tmp < best:
                    best = tmp
                tmp = curr[j - 1] + 1
                if tmp < best:
                    best = tmp
                curr[j] = best
            swap = prev
            prev = curr
            curr = swap
        return <int>prev[lb]
    finally:
        free(bv)
        free(prev)
        free(curr)
