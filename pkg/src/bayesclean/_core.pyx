# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: edit distance, per-attribute distance matrices, candidate filtering."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef int _lev(const cnp.uint32_t[:] a, const cnp.uint32_t[:] b, int cap) noexcept nogil:
    # Two-row DP with an early exit once every cell in a row exceeds cap.
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    cdef int *prev
    cdef int *cur
    cdef int *tmp
    cdef int best, v, ins, dele
    if n == 0:
        return m
    if m == 0:
        return n
    prev = <int *> malloc((m + 1) * sizeof(int))
    cur = <int *> malloc((m + 1) * sizeof(int))
    for j in range(m + 1):
        prev[j] = j
    for i in range(1, n + 1):
        cur[0] = i
        best = i
        for j in range(1, m + 1):
            v = prev[j - 1] + (a[i - 1] != b[j - 1])
            ins = cur[j - 1] + 1
            dele = prev[j] + 1
            if ins < v:
                v = ins
            if dele < v:
                v = dele
            cur[j] = v
            if v < best:
                best = v
        tmp = prev
        prev = cur
        cur = tmp
        if cap >= 0 and best > cap:
            free(prev)
            free(cur)
            return cap + 1
    v = prev[m]
    free(prev)
    free(cur)
    if cap >= 0 and v > cap:
        return cap + 1
    return v


cdef inline cnp.ndarray _codepoints(str s):
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


def levenshtein(str a, str b):
    """Unit-cost Levenshtein distance between two strings."""
    if a == b:
        return 0
    return _lev(_codepoints(a), _codepoints(b), -1)


def bounded_levenshtein(str a, str b, int cap):
    """Levenshtein distance, or ``cap + 1`` once the distance is known to exceed ``cap``."""
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    if a == b:
        return 0
    return _lev(_codepoints(a), _codepoints(b), cap)


def distance_matrix(list values, int cap):
    """Symmetric matrix of capped edit distances between all pairs of ``values``."""
    cdef Py_ssize_t k = len(values), i, j
    cdef cnp.ndarray[cnp.int32_t, ndim=2] out = np.zeros((k, k), dtype=np.int32)
    cdef list points = [_codepoints(v) for v in values]
    cdef Py_ssize_t[:] lengths = np.array([len(v) for v in values], dtype=np.intp)
    cdef const cnp.uint32_t[:] pa
    cdef const cnp.uint32_t[:] pb
    cdef int d
    for i in range(k):
        pa = points[i]
        for j in range(i + 1, k):
            if abs(lengths[i] - lengths[j]) > cap:
                d = cap + 1
            else:
                pb = points[j]
                d = _lev(pa, pb, cap)
            out[i, j] = d
            out[j, i] = d
    return out


def rows_within(const cnp.int32_t[:, :] codes, list rows, int threshold):
    """Indices of rows of ``codes`` whose summed per-column distance is <= threshold.

    ``rows[c][k]`` is the distance from the query's column-``c`` value to code ``k``.
    """
    cdef Py_ssize_t n = codes.shape[0], m = codes.shape[1], r, c
    cdef Py_ssize_t count = 0
    cdef long total
    cdef cnp.ndarray[cnp.intp_t, ndim=1] hits = np.empty(n, dtype=np.intp)
    cdef const cnp.int32_t[:] row
    cdef const cnp.int32_t ** ptrs = <const cnp.int32_t **> malloc(m * sizeof(cnp.int32_t *))
    cdef list keep = []
    for c in range(m):
        row = rows[c]
        keep.append(row)
        ptrs[c] = &row[0]
    with nogil:
        for r in range(n):
            total = 0
            for c in range(m):
                total += ptrs[c][codes[r, c]]
                if total > threshold:
                    break
            if total <= threshold:
                hits[count] = r
                count += 1
    free(ptrs)
    return hits[:count]
