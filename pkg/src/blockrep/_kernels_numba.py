"""Numba-compiled hot kernels.

These four loops dominate runtime at megabyte scale: suffix ordering,
adjacent common-prefix lengths, enumeration of repeat classes, and the
Fisher-Yates shuffle.  Each has a drop-in twin in `_kernels_numpy` selected
via the BLOCKREP_BACKEND environment flag; both backends must return
bit-identical arrays (covered by the cross-backend test suite).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def suffix_array(codes):
    """Suffix array by rank doubling with counting sorts, O(n log n).

    `codes` must be int32 values compacted to [0, sigma).  Rounds stop as
    soon as all ranks are distinct, so texts with short maximal repeats
    finish in a handful of passes.
    """
    n = codes.shape[0]
    sa = np.empty(n, np.int32)
    rank = np.empty(n, np.int64)
    tmp = np.empty(n, np.int64)
    sigma = 0
    for i in range(n):
        if codes[i] >= sigma:
            sigma = codes[i] + 1
    cnt = np.zeros(sigma if sigma > n + 1 else n + 1, np.int64)
    for i in range(n):
        cnt[codes[i]] += 1
    for c in range(1, sigma):
        cnt[c] += cnt[c - 1]
    for i in range(n - 1, -1, -1):
        c = codes[i]
        cnt[c] -= 1
        sa[cnt[c]] = i
    rank[sa[0]] = 0
    r = 0
    for i in range(1, n):
        if codes[sa[i]] != codes[sa[i - 1]]:
            r += 1
        rank[sa[i]] = r
    k = 1
    sa2 = np.empty(n, np.int32)
    while r < n - 1 and k < n:
        # order by second key (rank at i+k): suffixes with no second key first,
        # then previous sa order shifted left by k
        p = 0
        for i in range(n - k, n):
            sa2[p] = i
            p += 1
        for t in range(n):
            j = sa[t] - k
            if j >= 0:
                sa2[p] = j
                p += 1
        # stable counting sort by first key
        cnt2 = np.zeros(r + 2, np.int64)
        for i in range(n):
            cnt2[rank[i]] += 1
        s = 0
        for c in range(r + 1):
            t = cnt2[c]
            cnt2[c] = s
            s += t
        for t in range(n):
            i = sa2[t]
            sa[cnt2[rank[i]]] = i
            cnt2[rank[i]] += 1
        tmp[sa[0]] = 0
        r = 0
        for t in range(1, n):
            a = sa[t - 1]
            b = sa[t]
            ra2 = rank[a + k] if a + k < n else -1
            rb2 = rank[b + k] if b + k < n else -1
            if rank[a] != rank[b] or ra2 != rb2:
                r += 1
            tmp[b] = r
        for i in range(n):
            rank[i] = tmp[i]
        k <<= 1
    return sa


@njit(cache=True)
def lcp_array(codes, sa):
    """Kasai's algorithm: lcp[i] = common prefix of suffixes sa[i-1], sa[i]."""
    n = sa.shape[0]
    rank = np.empty(n, np.int32)
    for i in range(n):
        rank[sa[i]] = i
    lcp = np.zeros(n, np.int32)
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            hi = n - (i if i > j else j)
            while h < hi and codes[i + h] == codes[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return lcp


@njit(cache=True)
def repeat_classes(lcp):
    """Enumerate repeated-substring classes from the lcp array.

    Walks the lcp-interval structure with an explicit stack and emits one
    class per interval node: (occurrence count, shallowest length, deepest
    length).  Together with the count-1 classes derived from individual
    suffixes, these partition all distinct substrings of the text.
    """
    n = lcp.shape[0]
    out_count = np.empty(n, np.int64)
    out_lo = np.empty(n, np.int32)
    out_hi = np.empty(n, np.int32)
    m = 0
    stack_d = np.empty(n + 1, np.int32)
    stack_l = np.empty(n + 1, np.int32)
    top = 0
    stack_d[0] = 0
    stack_l[0] = 0
    for i in range(1, n + 1):
        cur = lcp[i] if i < n else 0
        lb = i - 1
        while cur < stack_d[top]:
            d = stack_d[top]
            left = stack_l[top]
            top -= 1
            parent = stack_d[top] if stack_d[top] > cur else cur
            if d > parent:
                out_count[m] = i - left
                out_lo[m] = parent + 1
                out_hi[m] = d
                m += 1
            lb = left
        if cur > stack_d[top]:
            top += 1
            stack_d[top] = cur
            stack_l[top] = lb
    return out_count[:m], out_lo[:m], out_hi[:m]


@njit(cache=True)
def shuffle_codes(codes, seed):
    """Fisher-Yates shuffle driven by the splitmix64 stream (rejection
    sampled, so the permutation is exactly uniform).  Returns a copy."""
    out = codes.copy()
    n = out.shape[0]
    state = np.uint64(seed)
    zero = np.uint64(0)
    for i in range(n - 1, 0, -1):
        bound = np.uint64(i + 1)
        rem = (np.uint64(0xFFFFFFFFFFFFFFFF) % bound + np.uint64(1)) % bound
        threshold = zero - rem  # 2**64 - rem (wraps); rem == 0 accepts all
        while True:
            state = state + _GOLD
            z = state
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
            u = z ^ (z >> np.uint64(31))
            if rem == zero or u < threshold:
                break
        j = np.int64(u % bound)
        t = out[i]
        out[i] = out[j]
        out[j] = t
    return out


@njit(cache=True)
def power_diff_int64(counts, lo, hi, order, m_cap):
    """Difference-array accumulation of count**order over class length spans.

    int64 fast path only: the caller must have certified that the total sum
    of terms fits 2**61, which bounds every partial value reached here.
    """
    diff_power = np.zeros(m_cap + 1, np.int64)
    diff_types = np.zeros(m_cap + 1, np.int64)
    for t in range(counts.shape[0]):
        c = counts[t]
        if c < order:
            continue
        a = lo[t]
        if a > m_cap:
            continue
        b = hi[t] if hi[t] < m_cap else m_cap
        term = c ** order
        diff_power[a - 1] += term
        diff_power[b] -= term
        diff_types[a - 1] += 1
        diff_types[b] -= 1
    return diff_power, diff_types


def warmup() -> None:
    """Force JIT compilation of every kernel on tiny inputs."""
    codes = np.array([1, 0, 2, 1, 0, 2], np.int32)
    sa = suffix_array(codes)
    lcp = lcp_array(codes, sa)
    counts, lo, hi = repeat_classes(lcp)
    power_diff_int64(counts, lo, hi, 2, 6)
    shuffle_codes(np.array([3, 1, 4, 1, 5], np.uint32), np.uint64(7))
