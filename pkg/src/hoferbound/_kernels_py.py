"""Pure-Python GF(2) kernels; reference twin of the compiled ``_kernels`` module.

Chains are Python ints used as bitsets.  Generator ``i`` is bit ``i`` and
generators are indexed in increasing filtration order, so the highest set
bit of a boundary is its filtration level (the "low" entry of the column).
"""

from __future__ import annotations

import math

__all__ = ["reduce_pairs", "search_min_depth"]


def reduce_pairs(cols):
    """Standard left-to-right column reduction.

    Returns the list of persistence pairs ``(low, column)``.
    """
    pivot_of = {}
    reduced = list(cols)
    pairs = []
    for j, v in enumerate(reduced):
        while v:
            k = pivot_of.get(v.bit_length() - 1)
            if k is None:
                break
            v ^= reduced[k]
        reduced[j] = v
        if v:
            low = v.bit_length() - 1
            pivot_of[low] = j
            pairs.append((low, j))
    return pairs


def search_min_depth(filt, grade, rows):
    """Branch-and-bound search for the acyclic differential of least depth.

    ``rows[j]`` lists the admissible targets of column ``j`` (all of lower
    index and grading one less).  Columns are assigned in order; a candidate
    column is dropped as soon as it breaks d^2 = 0, raises the running depth
    to the best found so far, or leaves more unpaired generators in some
    grading than later generators one grading up could ever pair.

    Returns ``(best_depth, best_columns, nodes)``; ``best_columns`` is None
    when no acyclic admissible differential exists.
    """
    n = len(filt)
    if n == 0:
        return 0.0, [], 1
    gmin = min(grade)
    G = max(grade) - gmin + 2
    gi = [g - gmin for g in grade]
    suffix = [[0] * G for _ in range(n + 1)]
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1][:]
        suffix[j][gi[j]] += 1

    cols = [0] * n
    red = [0] * n
    pivot = [-1] * n
    unpaired = [0] * G
    best = [math.inf, None]
    nodes = [0]

    def feasible(j, g):
        nxt = suffix[j + 1]
        if unpaired[g] > nxt[g + 1]:
            return False
        if g >= 1 and unpaired[g - 1] > nxt[g]:
            return False
        return True

    def dfs(j, beta):
        nodes[0] += 1
        if j == n:
            if beta < best[0] and not any(unpaired):
                best[0] = beta
                best[1] = cols[:]
            return
        R = rows[j]
        g = gi[j]
        for mask in range(1 << len(R)):
            v = 0
            for t, row in enumerate(R):
                if mask >> t & 1:
                    v |= 1 << row
            w = 0
            x = v
            while x:
                low = x.bit_length() - 1
                w ^= cols[low]
                x ^= 1 << low
            if w:
                continue
            r = v
            while r:
                k = pivot[r.bit_length() - 1]
                if k < 0:
                    break
                r ^= red[k]
            if r:
                low = r.bit_length() - 1
                nb = max(beta, filt[j] - filt[low])
                if nb >= best[0]:
                    continue
                unpaired[gi[low]] -= 1
                if feasible(j, g):
                    cols[j], red[j], pivot[low] = v, r, j
                    dfs(j + 1, nb)
                    cols[j], red[j], pivot[low] = 0, 0, -1
                unpaired[gi[low]] += 1
            else:
                unpaired[g] += 1
                if feasible(j, g):
                    cols[j] = v
                    dfs(j + 1, beta)
                    cols[j] = 0
                unpaired[g] -= 1

    dfs(0, 0.0)
    return best[0], best[1], nodes[0]
