"""Pure-Python kernels. Used when the compiled ``_core`` extension is unavailable."""

import numpy as np


def levenshtein(a, b):
    """Unit-cost Levenshtein distance between two strings."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def bounded_levenshtein(a, b, cap):
    """Levenshtein distance, or ``cap + 1`` once the distance is known to exceed ``cap``."""
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    d = levenshtein(a, b)
    return d if d <= cap else cap + 1


def distance_matrix(values, cap):
    """Symmetric matrix of capped edit distances between all pairs of ``values``."""
    k = len(values)
    out = np.zeros((k, k), dtype=np.int32)
    lengths = [len(v) for v in values]
    for i in range(k):
        for j in range(i + 1, k):
            if abs(lengths[i] - lengths[j]) > cap:
                d = cap + 1
            else:
                d = bounded_levenshtein(values[i], values[j], cap)
            out[i, j] = out[j, i] = d
    return out


def rows_within(codes, rows, threshold):
    """Indices of rows of ``codes`` whose summed per-column distance is <= threshold.

    ``rows[c][k]`` is the distance from the query's column-``c`` value to code ``k``.
    """
    total = np.zeros(codes.shape[0], dtype=np.int64)
    for col, row in enumerate(rows):
        total += row[codes[:, col]]
    return np.flatnonzero(total <= threshold)
