# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled suffix-index kernel.

Same surface as ``wordcq.kernel.pure``: prefix-doubling suffix array
(counting-sort passes), Kasai LCP array, sparse-table RMQ.
"""

import numpy as np

BACKEND = "native"


def _suffix_array(codes_obj):
    cdef int n = len(codes_obj)
    out = np.zeros(n, dtype=np.intc)
    if n == 0:
        return out
    codes_np = np.asarray(codes_obj, dtype=np.intc)
    cdef int[:] codes = codes_np
    cdef int[:] sa = out
    rank_np = np.empty(n, dtype=np.intc)
    tmp_np = np.empty(n, dtype=np.intc)
    newrank_np = np.empty(n, dtype=np.intc)
    cdef int[:] rank = rank_np
    cdef int[:] tmp = tmp_np
    cdef int[:] newrank = newrank_np
    cdef int i, k, p, classes, K, c1, c2, p1, p2

    K = 0
    for i in range(n):
        rank[i] = codes[i]
        if codes[i] > K:
            K = codes[i]
    K += 1
    cnt_np = np.zeros((K if K > n else n) + 1, dtype=np.intc)
    cdef int[:] cnt = cnt_np

    for i in range(K):
        cnt[i] = 0
    for i in range(n):
        cnt[rank[i]] += 1
    for i in range(1, K):
        cnt[i] += cnt[i - 1]
    for i in range(n - 1, -1, -1):
        cnt[rank[i]] -= 1
        sa[cnt[rank[i]]] = i

    classes = 0
    newrank[sa[0]] = 0
    for i in range(1, n):
        if codes[sa[i]] != codes[sa[i - 1]]:
            classes += 1
        newrank[sa[i]] = classes
    classes += 1
    for i in range(n):
        rank[i] = newrank[i]

    k = 1
    while classes < n:
        p = 0
        for i in range(n - k, n):
            tmp[p] = i
            p += 1
        for i in range(n):
            if sa[i] >= k:
                tmp[p] = sa[i] - k
                p += 1
        for i in range(classes):
            cnt[i] = 0
        for i in range(n):
            cnt[rank[tmp[i]]] += 1
        for i in range(1, classes):
            cnt[i] += cnt[i - 1]
        for i in range(n - 1, -1, -1):
            cnt[rank[tmp[i]]] -= 1
            sa[cnt[rank[tmp[i]]]] = tmp[i]

        newrank[sa[0]] = 0
        classes = 1
        for i in range(1, n):
            c1 = rank[sa[i]]
            p1 = rank[sa[i - 1]]
            c2 = rank[sa[i] + k] if sa[i] + k < n else -1
            p2 = rank[sa[i - 1] + k] if sa[i - 1] + k < n else -1
            if c1 != p1 or c2 != p2:
                classes += 1
            newrank[sa[i]] = classes - 1
        for i in range(n):
            rank[i] = newrank[i]
        k <<= 1
    return out


cdef class SuffixKernel:
    """Suffix array + LCP array + RMQ over an integer-coded word."""

    cdef public int n
    cdef public object sa
    cdef public object lcp
    cdef public object rank
    cdef int[:] _sa
    cdef int[:] _lcp
    cdef int[:] _rank
    cdef int[:, :] _rows
    cdef int[:] _logs
    cdef int _levels

    backend = BACKEND

    def __init__(self, codes):
        cdef int n = len(codes)
        cdef int i, j, k, r, level, length
        self.n = n
        sa_np = _suffix_array(codes)
        self._sa = sa_np
        codes_np = np.asarray(codes, dtype=np.intc)
        cdef int[:] cview = codes_np

        rank_np = np.zeros(n, dtype=np.intc)
        lcp_np = np.zeros(n, dtype=np.intc)
        cdef int[:] rank = rank_np
        cdef int[:] lcp = lcp_np
        for r in range(n):
            rank[self._sa[r]] = r
        k = 0
        for i in range(n):
            r = rank[i]
            if r == 0:
                k = 0
                continue
            j = self._sa[r - 1]
            while i + k < n and j + k < n and cview[i + k] == cview[j + k]:
                k += 1
            lcp[r] = k
            if k:
                k -= 1
        self._rank = rank
        self._lcp = lcp

        logs_np = np.zeros(n + 1, dtype=np.intc)
        cdef int[:] logs = logs_np
        for i in range(2, n + 1):
            logs[i] = logs[i >> 1] + 1
        self._logs = logs
        self._levels = (logs[n] + 1) if n else 0
        rows_np = np.zeros((self._levels if self._levels else 1, n if n else 1),
                           dtype=np.intc)
        cdef int[:, :] rows = rows_np
        for i in range(n):
            rows[0, i] = lcp[i]
        length = 1
        level = 1
        while 2 * length <= n:
            for i in range(n - 2 * length + 1):
                if rows[level - 1, i] <= rows[level - 1, i + length]:
                    rows[level, i] = rows[level - 1, i]
                else:
                    rows[level, i] = rows[level - 1, i + length]
            length *= 2
            level += 1
        self._rows = rows

        self.sa = sa_np.tolist()
        self.lcp = lcp_np.tolist()
        self.rank = rank_np.tolist()

    cdef inline int _range_min(self, int lo, int hi):
        cdef int level = self._logs[hi - lo + 1]
        cdef int a = self._rows[level, lo]
        cdef int b = self._rows[level, hi - (1 << level) + 1]
        return a if a <= b else b

    cpdef int suffix_lcp(self, int i, int j):
        """LCP length of the suffixes starting at 0-based positions i, j."""
        cdef int ri, rj, t
        if i == j:
            return self.n - i
        ri = self._rank[i]
        rj = self._rank[j]
        if ri > rj:
            t = ri
            ri = rj
            rj = t
        return self._range_min(ri + 1, rj)

    cpdef int block_lo(self, int pos, int length):
        """Leftmost suffix-array slot whose suffix starts with the factor
        of the given length at 0-based position pos."""
        cdef int r, lo, hi, mid
        if length == 0:
            return 0
        r = self._rank[pos]
        lo = 0
        hi = r
        while lo < hi:
            mid = (lo + hi) // 2
            if self._range_min(mid + 1, r) >= length:
                hi = mid
            else:
                lo = mid + 1
        return lo
