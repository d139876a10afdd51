"""Pure-Python suffix-index kernel.

Behavioral twin of the compiled kernel in ``_native.pyx``: suffix array by
prefix doubling, LCP array by Kasai's algorithm, and a sparse table for
constant-time range-minimum queries over the LCP array.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def build_suffix_array(codes: list[int]) -> list[int]:
    """Suffix array of an integer sequence via prefix doubling."""
    n = len(codes)
    if n == 0:
        return []
    rank = np.asarray(codes, dtype=np.int64)
    k = 1
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        if k < n:
            key2[:-k] = rank[k:]
        order = np.lexsort((key2, rank))
        fresh = np.empty(n, dtype=np.int64)
        fresh[order[0]] = 0
        bumped = (rank[order[1:]] != rank[order[:-1]]) | (
            key2[order[1:]] != key2[order[:-1]]
        )
        fresh[order[1:]] = np.cumsum(bumped)
        rank = fresh
        if rank[order[-1]] == n - 1:
            return order.tolist()
        k *= 2


def build_lcp_array(codes: list[int], sa: list[int]) -> tuple[list[int], list[int]]:
    """Kasai: lcp[r] = common-prefix length of suffixes sa[r-1] and sa[r]."""
    n = len(sa)
    rank = [0] * n
    for r, s in enumerate(sa):
        rank[s] = r
    lcp = [0] * n
    k = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            k = 0
            continue
        j = sa[r - 1]
        while i + k < n and j + k < n and codes[i + k] == codes[j + k]:
            k += 1
        lcp[r] = k
        if k:
            k -= 1
    return lcp, rank


class _SparseTable:
    """Idempotent range-minimum structure: O(n log n) build, O(1) query."""

    def __init__(self, data: list[int]):
        self.logs = logs = [0] * (len(data) + 1)
        for i in range(2, len(data) + 1):
            logs[i] = logs[i >> 1] + 1
        self.rows = rows = [list(data)]
        length = 1
        while 2 * length <= len(data):
            prev = rows[-1]
            rows.append(
                [
                    min(prev[i], prev[i + length])
                    for i in range(len(data) - 2 * length + 1)
                ]
            )
            length *= 2

    def range_min(self, lo: int, hi: int) -> int:
        """Minimum of data[lo..hi], inclusive; requires lo <= hi."""
        level = self.logs[hi - lo + 1]
        row = self.rows[level]
        return min(row[lo], row[hi - (1 << level) + 1])


class SuffixKernel:
    """Suffix array + LCP array + RMQ over an integer-coded word."""

    backend = BACKEND

    def __init__(self, codes: list[int]):
        self.n = len(codes)
        self.sa = build_suffix_array(codes)
        self.lcp, self.rank = build_lcp_array(codes, self.sa)
        self._table = _SparseTable(self.lcp) if self.n else None

    def suffix_lcp(self, i: int, j: int) -> int:
        """LCP length of the suffixes starting at 0-based positions i, j."""
        if i == j:
            return self.n - i
        ri = self.rank[i]
        rj = self.rank[j]
        if ri > rj:
            ri, rj = rj, ri
        return self._table.range_min(ri + 1, rj)

    def block_lo(self, pos: int, length: int) -> int:
        """Leftmost suffix-array slot whose suffix starts with the factor
        of the given length at 0-based position pos."""
        if length == 0:
            return 0
        r = self.rank[pos]
        lo, hi = 0, r
        while lo < hi:
            mid = (lo + hi) // 2
            if self._table.range_min(mid + 1, r) >= length:
                hi = mid
            else:
                lo = mid + 1
        return lo
