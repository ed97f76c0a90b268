"""Entropy growth spectra with finite-size corrections.

The empirical spectrum of order a treats each length-m block frequency
count/T_m as a probability and reports

    H_a(m) = log2( sum (count/T_m)**a ) / (1 - a)      [bits]

restricted to blocks occurring at least `a` times (rarer blocks carry no
signal at that order and dragging them in is what bends iid calibration
curves off their straight line).  The thresholded mass is deliberately not
renormalized.

Because only a finite number of block positions exist, H_a(m) sits below
the log-count of distinguishable block types by a correction that depends
only on the occupancy ratio lambda (positions per effective type).  The
occupancy follows from the repetition fraction r = D_m / T_m through

    r = f(lambda) = 1 - (1 - exp(-lambda)) / lambda,

which is strictly increasing, so lambda recovers by bracketed bisection.
Adding the closed-form correction delta_a(lambda) to H_a(m) yields the
growth series y_m that the fitting module models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import BlockStatsSeries, PowerSumSeries
from .errors import MismatchedSeries, OutOfRange, UnsupportedOrder

RESIDUAL_TOL = 1e-10  # |f(lambda) - r| guaranteed by the inversion


@dataclass(frozen=True)
class EntropySpectrum:
    """H_a(m) in bits for one order; NaN (defined=False) where no block
    of length m occurs at least `order` times."""

    n: int
    m_cap: int
    order: int
    values: np.ndarray
    defined: np.ndarray
    totals: np.ndarray  # T_m, carried for normalization

    def m_values(self) -> np.ndarray:
        return np.arange(1, self.m_cap + 1, dtype=np.int64)


@dataclass(frozen=True)
class LambdaSeries:
    """Occupancy ratio per block length, from repetition fractions.

    Undefined at lengths where inversion is singular: no repeats at all
    (D_m = 0) or repeats at the ceiling (D_m = T_m - 1).
    """

    n: int
    m_cap: int
    values: np.ndarray
    defined: np.ndarray


@dataclass(frozen=True)
class CorrectedSeries:
    """y_m = H_a(m) + delta_a(lambda_m): the corrected growth series."""

    n: int
    m_cap: int
    order: int
    values: np.ndarray
    defined: np.ndarray

    def m_values(self) -> np.ndarray:
        return np.arange(1, self.m_cap + 1, dtype=np.int64)


def expected_repeat_fraction(lam):
    """f(lambda) = 1 - (1 - exp(-lambda)) / lambda, for lambda > 0.

    Strictly increasing from 0 to 1; computed via expm1 so small
    occupancies do not lose precision (f ~ lambda/2 near zero).
    """
    lam = np.asarray(lam, dtype=np.float64)
    out = 1.0 + np.expm1(-lam) / lam
    return out if out.ndim else float(out)


def _invert_repeat_fraction(r: np.ndarray) -> np.ndarray:
    """Vectorized bisection solving f(lam) = r to RESIDUAL_TOL in f-space.

    Bracket: f(lam) <= lam/2 gives the lower end; f(lam) >= 1 - 1/lam makes
    4 / (1 - r) a guaranteed upper end.  Bisection is slower than Newton but
    has no failure modes, and it runs at most once per block length.
    """
    r = np.asarray(r, dtype=np.float64)
    lo = np.full(r.shape, 1e-300)
    hi = np.maximum(4.0 / (1.0 - r), 1.0)
    mid = 0.5 * (lo + hi)
    for _ in range(300):
        width = hi - lo
        if np.all(width <= np.maximum(1e-14, 1e-12 * mid)):
            break
        mid = 0.5 * (lo + hi)
        too_low = expected_repeat_fraction(mid) < r
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
    mid = 0.5 * (lo + hi)
    return mid


def repetition_fraction_to_lambda(r: float) -> float:
    """Invert the repetition fraction into an occupancy ratio.

    Requires 0 < r < 1; the result satisfies |f(lam) - r| <= 1e-10.
    Scalar twin of the vectorized bisection (same bracket, same schedule).
    """
    if not 0.0 < r < 1.0:
        raise OutOfRange(f"repetition fraction must lie in (0, 1), got {r}")
    lo = 1e-300
    hi = max(4.0 / (1.0 - r), 1.0)
    mid = 0.5 * (lo + hi)
    for _ in range(300):
        if hi - lo <= max(1e-14, 1e-12 * mid):
            break
        mid = 0.5 * (lo + hi)
        if 1.0 + math.expm1(-mid) / mid < r:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    if abs(expected_repeat_fraction(lam) - r) > RESIDUAL_TOL:
        raise OutOfRange(f"inversion residual above tolerance at r={r}")
    return lam


def delta_correction(order: int, lam):
    """Finite-size correction (bits) subtracted from the log type count.

    Closed forms exist for orders 2..4:

        delta_2 = log2(1 + 1/lam)
        delta_3 = log2(1 + 3/lam + 1/lam**2) / 2
        delta_4 = log2(1 + 6/lam + 7/lam**2 + 1/lam**3) / 3

    Each is positive, strictly decreasing in lambda, and vanishes as the
    occupancy grows.
    """
    lam = np.asarray(lam, dtype=np.float64)
    inv = 1.0 / lam
    if order == 2:
        out = np.log2(1.0 + inv)
    elif order == 3:
        out = 0.5 * np.log2(1.0 + 3.0 * inv + inv**2)
    elif order == 4:
        out = np.log2(1.0 + 6.0 * inv + 7.0 * inv**2 + inv**3) / 3.0
    else:
        raise UnsupportedOrder(f"correction known for orders 2-4, got {order}")
    return out if out.ndim else float(out)


def renyi_spectrum(power: PowerSumSeries, stats: BlockStatsSeries) -> EntropySpectrum:
    """Empirical spectrum from exact power sums.

    H_a(m) = (log2 P_a(m) - a log2 T_m) / (1 - a) wherever P_a(m) > 0.
    The log of the exact integer sum is taken directly, so no precision is
    lost to overflowing floats.
    """
    if power.n != stats.n or power.m_cap != stats.m_cap:
        raise MismatchedSeries(
            f"power sums (n={power.n}, m_cap={power.m_cap}) vs "
            f"block stats (n={stats.n}, m_cap={stats.m_cap})"
        )
    cap = power.m_cap
    values = np.full(cap, np.nan)
    defined = np.zeros(cap, dtype=bool)
    inv = 1.0 / (1.0 - power.order)
    for i, p in enumerate(power.values):
        if p > 0:
            # log of the exact integer ratio; cancels exactly when one block
            # type fills every position (zero-entropy edge)
            denom = int(stats.totals[i]) ** power.order
            values[i] = inv * (math.log2(p) - math.log2(denom))
            defined[i] = True
    return EntropySpectrum(
        n=power.n,
        m_cap=cap,
        order=power.order,
        values=values,
        defined=defined,
        totals=stats.totals.copy(),
    )


def lambda_series(stats: BlockStatsSeries) -> LambdaSeries:
    """Occupancy ratios for every block length with an invertible fraction."""
    totals = stats.totals.astype(np.float64)
    repeats = stats.repeats.astype(np.float64)
    defined = (stats.repeats > 0) & (stats.repeats < stats.totals - 1)
    values = np.full(stats.m_cap, np.nan)
    if defined.any():
        values[defined] = _invert_repeat_fraction(repeats[defined] / totals[defined])
    return LambdaSeries(n=stats.n, m_cap=stats.m_cap, values=values, defined=defined)


def corrected_series(spectrum: EntropySpectrum, lambdas: LambdaSeries) -> CorrectedSeries:
    """Apply the finite-size correction wherever both inputs are defined."""
    if spectrum.n != lambdas.n or spectrum.m_cap != lambdas.m_cap:
        raise MismatchedSeries(
            f"spectrum (n={spectrum.n}, m_cap={spectrum.m_cap}) vs "
            f"lambda series (n={lambdas.n}, m_cap={lambdas.m_cap})"
        )
    defined = spectrum.defined & lambdas.defined
    values = np.full(spectrum.m_cap, np.nan)
    if defined.any():
        values[defined] = spectrum.values[defined] + delta_correction(
            spectrum.order, lambdas.values[defined]
        )
    return CorrectedSeries(
        n=spectrum.n,
        m_cap=spectrum.m_cap,
        order=spectrum.order,
        values=values,
        defined=defined,
    )
