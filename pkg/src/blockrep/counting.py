"""Exact repeated-block statistics over symbol sequences.

A text of length n has T_m = n - m + 1 blocks (contiguous runs) of length m.
With K_m the number of distinct block types, the repetition count is
D_m = T_m - K_m; occurrences may overlap.  This module builds a suffix
index once per text and reads every per-length quantity out of it:

* repetition counts for all m in one pass (D_m equals the number of
  adjacent suffix pairs whose common prefix is at least m),
* repeat classes (occurrence count, covered length span) that partition
  all distinct substrings, from which thresholded frequency power sums
  are accumulated exactly,
* the maximal repeated-block length.

All functions are pure and an index is read-only after construction, so
texts can be processed in parallel without shared state.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import backend
from .errors import (
    CapExceedsLength,
    EmptyAfterNormalization,
    InvalidEncoding,
    UnsupportedOrder,
)

# sum of int64 power terms guaranteed overflow-free below this (4x headroom)
_INT64_SAFE_TOTAL = float(2**61)


class Provenance(str, Enum):
    NATURAL = "natural"
    GENERATED = "generated"
    SYNTHETIC = "synthetic"
    SHUFFLED = "shuffled"


@dataclass(frozen=True)
class NormalizationOptions:
    """Configurable text cleanup.

    Defaults preserve case and punctuation: the analysis is defined on raw
    symbols and dropping information is opt-in.  `strip_boilerplate`
    removes a standard Project Gutenberg header/footer when the sentinel
    lines are present.
    """

    strip_boilerplate: bool = False
    lowercase: bool = False
    drop_punctuation: bool = False


@dataclass(frozen=True)
class AnalyzedText:
    """A normalized symbol sequence plus provenance metadata."""

    symbols: str
    source_id: str = "text"
    provenance: Provenance = Provenance.NATURAL

    def __post_init__(self):
        if not self.symbols:
            raise EmptyAfterNormalization(f"{self.source_id}: no symbols")

    @property
    def n(self) -> int:
        return len(self.symbols)

    def scalar_values(self) -> np.ndarray:
        """Unicode scalar values as uint32, one per symbol."""
        return np.frombuffer(self.symbols.encode("utf-32-le"), dtype=np.uint32)


_WS_RUN = re.compile(r"[ \t\n\r]+")
_BOILER_START = re.compile(r"\*\*\*\s*START OF (?:THE|THIS)[^*\n]*\*\*\*", re.IGNORECASE)
_BOILER_END = re.compile(r"\*\*\*\s*END OF (?:THE|THIS)[^*\n]*\*\*\*", re.IGNORECASE)


def _strip_boilerplate(text: str) -> str:
    start = _BOILER_START.search(text)
    end = _BOILER_END.search(text)
    if start is None and end is None:
        warnings.warn("no boilerplate sentinels found; keeping full text", stacklevel=3)
        return text
    lo = start.end() if start is not None else 0
    hi = end.start() if end is not None else len(text)
    if hi <= lo:
        warnings.warn("boilerplate sentinels out of order; keeping full text", stacklevel=3)
        return text
    return text[lo:hi]


def normalize_text(
    raw: bytes | str,
    options: NormalizationOptions | None = None,
    source_id: str = "text",
    provenance: Provenance = Provenance.NATURAL,
) -> AnalyzedText:
    """Decode and normalize raw input into an AnalyzedText.

    Runs of space, tab, newline and carriage return collapse to a single
    space and leading/trailing whitespace is removed.  Case and punctuation
    are preserved unless the options say otherwise.  Normalization is
    idempotent: feeding the resulting symbols back in is a no-op.

    Raises InvalidEncoding for non-UTF-8 bytes and EmptyAfterNormalization
    when nothing survives.
    """
    opts = options or NormalizationOptions()
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidEncoding(f"{source_id}: {exc}") from None
    else:
        text = raw
    if opts.strip_boilerplate:
        text = _strip_boilerplate(text)
    if opts.lowercase:
        text = text.lower()
    if opts.drop_punctuation:
        import unicodedata

        text = "".join(c for c in text if not unicodedata.category(c).startswith("P"))
    text = _WS_RUN.sub(" ", text).strip()
    if not text:
        raise EmptyAfterNormalization(f"{source_id}: empty after normalization")
    return AnalyzedText(symbols=text, source_id=source_id, provenance=provenance)


@dataclass(frozen=True)
class SubstringIndex:
    """Read-only suffix index over one text.

    Answers three query classes: adjacent-suffix common-prefix counts for
    every length (`repetition_counts`), repeat classes partitioning all
    distinct substrings (`classes` plus `single_classes`), and the maximal
    repeated-block length (`max_repetition`).
    """

    n: int
    alphabet_size: int
    _sa: np.ndarray = field(repr=False)
    _lcp: np.ndarray = field(repr=False)
    _class_counts: np.ndarray = field(repr=False)
    _class_lo: np.ndarray = field(repr=False)
    _class_hi: np.ndarray = field(repr=False)
    _repeat_counts: np.ndarray = field(repr=False)  # D_m for m = 1..max_repetition
    max_repetition: int

    @property
    def default_m_cap(self) -> int:
        """Longest informative cap: one past the maximal repetition."""
        return min(self.n, self.max_repetition + 1)

    def repetition_counts(self, m_cap: int) -> np.ndarray:
        """D_m for m = 1..m_cap (zero beyond the maximal repetition)."""
        out = np.zeros(m_cap, np.int64)
        k = min(m_cap, self._repeat_counts.shape[0])
        out[:k] = self._repeat_counts[:k]
        return out

    def classes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Repeated classes as (counts, first length, last length) arrays.

        Every class stands for one distinct substring per covered length,
        each occurring `count` (>= 2) times.
        """
        return self._class_counts, self._class_lo, self._class_hi

    def single_classes(self) -> tuple[np.ndarray, np.ndarray]:
        """Length spans (lo, hi) of the count-1 classes, one per suffix.

        Suffix starting at position p spans lengths (parent, n - p] where
        parent is the longest prefix it shares with any other suffix; empty
        spans (lo > hi) mean the suffix contributes no unique substring.
        """
        n = self.n
        neighbor = np.zeros(n, np.int64)
        if n > 1:
            neighbor[:-1] = np.maximum(self._lcp[:-1], self._lcp[1:])
            neighbor[-1] = self._lcp[-1]
            neighbor[0] = self._lcp[1]
        lo = neighbor + 1
        hi = n - self._sa.astype(np.int64)
        return lo, hi


def build_index(text: AnalyzedText) -> SubstringIndex:
    """Construct the suffix index (deterministic for given symbols)."""
    values = text.scalar_values()
    alphabet, compact = np.unique(values, return_inverse=True)
    codes = np.ascontiguousarray(compact.astype(np.int32))
    sa = backend.suffix_array(codes)
    lcp = backend.lcp_array(codes, sa)
    counts, lo, hi = backend.repeat_classes(lcp)
    n = codes.shape[0]
    if n > 1:
        hist = np.bincount(lcp[1:])
        repeats = np.cumsum(hist[::-1])[::-1][1:].astype(np.int64)  # drop m=0
        m_max = int(hist.shape[0] - 1)
        if m_max == 0:
            repeats = np.zeros(0, np.int64)
    else:
        repeats = np.zeros(0, np.int64)
        m_max = 0
    return SubstringIndex(
        n=n,
        alphabet_size=int(alphabet.shape[0]),
        _sa=sa,
        _lcp=lcp,
        _class_counts=counts,
        _class_lo=lo,
        _class_hi=hi,
        _repeat_counts=repeats,
        max_repetition=m_max,
    )


@dataclass(frozen=True)
class BlockStatsSeries:
    """Per-length block counts: totals T_m, distinct types K_m, repeats D_m."""

    n: int
    m_cap: int
    totals: np.ndarray
    types: np.ndarray
    repeats: np.ndarray

    def m_values(self) -> np.ndarray:
        return np.arange(1, self.m_cap + 1, dtype=np.int64)


@dataclass(frozen=True)
class PowerSumSeries:
    """Thresholded frequency power sums for one entropy order.

    values[m-1] sums count**order over distinct length-m blocks occurring
    at least `order` times; kept as exact python integers because fourth
    powers of megabyte-scale counts overflow 64 bits.  eligible_types[m-1]
    is the number of contributing block types.
    """

    n: int
    m_cap: int
    order: int
    values: tuple[int, ...]
    eligible_types: np.ndarray

    def m_values(self) -> np.ndarray:
        return np.arange(1, self.m_cap + 1, dtype=np.int64)


def _check_cap(index: SubstringIndex, m_cap: int | None) -> int:
    if m_cap is None:
        return index.default_m_cap
    if not 1 <= m_cap <= index.n:
        raise CapExceedsLength(f"m_cap={m_cap} outside [1, {index.n}]")
    return m_cap


def block_stats(index: SubstringIndex, m_cap: int | None = None) -> BlockStatsSeries:
    """Exact (T_m, K_m, D_m) for every m in [1, m_cap].

    The defaults cap at one past the maximal repetition; beyond it every
    block is unique and the series carries no further information.
    """
    cap = _check_cap(index, m_cap)
    m = np.arange(1, cap + 1, dtype=np.int64)
    totals = index.n - m + 1
    repeats = index.repetition_counts(cap)
    types = totals - repeats
    return BlockStatsSeries(n=index.n, m_cap=cap, totals=totals, types=types, repeats=repeats)


def power_sums(index: SubstringIndex, order: int, m_cap: int | None = None) -> PowerSumSeries:
    """Exact thresholded power sums for one order (any integer >= 2).

    Accumulates count**order over the repeat classes with a difference
    array.  When a float certificate shows the total fits comfortably in
    int64 the compiled kernel path is used; otherwise the sum falls back
    to python integers, which are exact at any magnitude.
    """
    if order < 2:
        raise UnsupportedOrder(f"order must be >= 2, got {order}")
    cap = _check_cap(index, m_cap)
    counts, lo, hi = index.classes()
    sel = counts >= order
    total = float(np.sum(counts[sel].astype(np.float64) ** order)) if sel.any() else 0.0
    if total < _INT64_SAFE_TOTAL:
        diff_power, diff_types = backend.power_diff_int64(counts, lo, hi, order, cap)
        values = tuple(int(v) for v in np.cumsum(diff_power[:cap]))
        eligible = np.cumsum(diff_types[:cap])
    else:
        diff_p = [0] * (cap + 1)
        diff_t = np.zeros(cap + 1, np.int64)
        for c, a, b in zip(counts.tolist(), lo.tolist(), hi.tolist()):
            if c < order or a > cap:
                continue
            b = min(b, cap)
            term = c**order
            diff_p[a - 1] += term
            diff_p[b] -= term
            diff_t[a - 1] += 1
            diff_t[b] -= 1
        acc = 0
        vals = []
        for i in range(cap):
            acc += diff_p[i]
            vals.append(acc)
        values = tuple(vals)
        eligible = np.cumsum(diff_t[:cap])
    return PowerSumSeries(
        n=index.n, m_cap=cap, order=order, values=values, eligible_types=eligible
    )


def max_repetition(index: SubstringIndex) -> int:
    """Largest length at which some block occurs at two distinct starts."""
    return index.max_repetition
