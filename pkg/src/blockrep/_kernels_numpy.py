"""Pure numpy / python fallbacks for the hot kernels.

Same contracts and bit-identical outputs as `_kernels_numba`, selected with
BLOCKREP_BACKEND=numpy.  Slower (the lcp and class walks are plain python
loops) but dependency-light and handy for debugging.
"""

from __future__ import annotations

import numpy as np

from .rng import MASK64, SplitMix64


def suffix_array(codes: np.ndarray) -> np.ndarray:
    """Rank-doubling suffix array using np.lexsort for each round."""
    n = codes.shape[0]
    if n == 1:
        return np.zeros(1, np.int32)
    rank = codes.astype(np.int64)
    k = 1
    while True:
        rank2 = np.full(n, -1, np.int64)
        rank2[: n - k] = rank[k:]
        sa = np.lexsort((rank2, rank))
        fresh = np.empty(n, np.int64)
        fresh[sa[0]] = 0
        changed = (rank[sa[1:]] != rank[sa[:-1]]) | (rank2[sa[1:]] != rank2[sa[:-1]])
        fresh[sa[1:]] = np.cumsum(changed)
        rank = fresh
        if rank[sa[-1]] == n - 1:
            return sa.astype(np.int32)
        k <<= 1


def lcp_array(codes: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai's algorithm over plain python lists (O(n) amortized)."""
    n = sa.shape[0]
    rank = np.empty(n, np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(n, np.int32)
    cl = codes.tolist()
    ranks = rank.tolist()
    sal = sa.tolist()
    h = 0
    for i in range(n):
        r = ranks[i]
        if r > 0:
            j = sal[r - 1]
            cap = n - (i if i > j else j)
            while h < cap and cl[i + h] == cl[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return lcp


def repeat_classes(lcp: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack walk of the lcp-interval structure; see the numba twin."""
    n = lcp.shape[0]
    vals = lcp.tolist()
    out_count: list[int] = []
    out_lo: list[int] = []
    out_hi: list[int] = []
    stack = [(0, 0)]  # (depth, left boundary)
    for i in range(1, n + 1):
        cur = vals[i] if i < n else 0
        lb = i - 1
        while cur < stack[-1][0]:
            d, left = stack.pop()
            parent = stack[-1][0] if stack[-1][0] > cur else cur
            if d > parent:
                out_count.append(i - left)
                out_lo.append(parent + 1)
                out_hi.append(d)
            lb = left
        if cur > stack[-1][0]:
            stack.append((cur, lb))
    return (
        np.asarray(out_count, np.int64),
        np.asarray(out_lo, np.int32),
        np.asarray(out_hi, np.int32),
    )


def shuffle_codes(codes: np.ndarray, seed) -> np.ndarray:
    """Fisher-Yates with the same splitmix64 stream as the numba kernel."""
    out = codes.copy()
    items = out.tolist()
    rng = SplitMix64(int(seed) & MASK64)
    for i in range(len(items) - 1, 0, -1):
        j = rng.next_below(i + 1)
        items[i], items[j] = items[j], items[i]
    return np.asarray(items, dtype=codes.dtype)


def power_diff_int64(
    counts: np.ndarray, lo: np.ndarray, hi: np.ndarray, order: int, m_cap: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized difference-array accumulation (int64-safe path only)."""
    diff_power = np.zeros(m_cap + 1, np.int64)
    diff_types = np.zeros(m_cap + 1, np.int64)
    sel = (counts >= order) & (lo <= m_cap)
    if np.any(sel):
        c = counts[sel]
        a = lo[sel].astype(np.int64)
        b = np.minimum(hi[sel].astype(np.int64), m_cap)
        term = c**order
        np.add.at(diff_power, a - 1, term)
        np.subtract.at(diff_power, b, term)
        np.add.at(diff_types, a - 1, 1)
        np.subtract.at(diff_types, b, 1)
    return diff_power, diff_types


def warmup() -> None:
    """Nothing to compile on this backend."""
