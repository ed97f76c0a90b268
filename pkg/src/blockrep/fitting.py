"""Growth-model fitting and maximal-repetition estimation.

Two competing one-term models describe how the corrected series grows with
block length m:

    power:      y(m) = scale * m**exponent
    log_power:  y(m) = scale * (log2 m)**exponent

Fits minimize squared error in observation space (that is where the quoted
R-squared lives), seeded by a log-space linear regression and refined with
bounded least squares.  No additive linear term is included: over the
accessible length range it is not separable from the sublinear component.

The maximal-repetition route is the classical baseline: sample the longest
repeated block length over log-spaced prefixes and regress its log against
log log n to get the growth exponent eta.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import least_squares

from . import backend
from .counting import AnalyzedText, BlockStatsSeries, PowerSumSeries
from .entropy import CorrectedSeries
from .errors import InsufficientRange, NonConvergence, RangeMismatch, TextTooShort
from .rng import SplitMix64


class ModelFamily(str, Enum):
    POWER = "power"
    LOG_POWER = "log_power"


@dataclass(frozen=True)
class FitResult:
    model: ModelFamily
    exponent: float
    scale: float
    r_squared: float
    fit_range: tuple[int, int]
    n_points: int


@dataclass(frozen=True)
class MaxRepCurve:
    """Median maximal-repetition lengths over log-spaced prefix lengths."""

    lengths: np.ndarray  # nominal prefix lengths, strictly increasing
    values: np.ndarray  # medians, nondecreasing
    smoothing_k: int
    sampling: str = "log-spaced, median of k jittered prefixes"


@dataclass(frozen=True)
class EtaResult:
    eta: float
    r_squared: float
    converged: bool


def select_fit_range(
    stats: BlockStatsSeries,
    power: PowerSumSeries,
    min_eligible_types: int = 10,
    min_repeats: int = 2,
) -> tuple[int, int]:
    """Pick [2, m_hi] where the spectrum still rests on enough block types.

    m_hi is the largest length with at least `min_eligible_types`
    contributing types, at least `min_repeats` repetitions, and an
    invertible repetition fraction.  The noisy tail beyond, where the
    thresholded spectrum sits on a handful of types, is excluded.  Raises
    InsufficientRange unless at least 3 lengths qualify.
    """
    if stats.n != power.n or stats.m_cap != power.m_cap:
        raise RangeMismatch("block stats and power sums cover different ranges")
    m = stats.m_values()
    invertible = (stats.repeats > 0) & (stats.repeats < stats.totals - 1)
    ok = (
        (m >= 2)
        & (power.eligible_types >= min_eligible_types)
        & (stats.repeats >= min_repeats)
        & invertible
    )
    if ok.sum() < 3:
        raise InsufficientRange(
            f"only {int(ok.sum())} usable lengths for order {power.order}"
        )
    m_hi = int(m[ok].max())
    return 2, m_hi


def _model_basis(model: ModelFamily, m: np.ndarray) -> np.ndarray:
    if model is ModelFamily.POWER:
        return m.astype(np.float64)
    return np.log2(m.astype(np.float64))


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else float("-inf")
    return 1.0 - ss_res / ss_tot


def fit_model(
    series: CorrectedSeries, model: ModelFamily, fit_range: tuple[int, int]
) -> FitResult:
    """Least-squares fit of one model family over the given length range.

    Initialized by linear regression of log2 y against log2 m (power) or
    log2 log2 m (log_power), then refined in y-space with positivity bounds
    on both parameters.  The refined fit never reports a worse residual
    than its initialization.
    """
    model = ModelFamily(model)
    m_lo, m_hi = fit_range
    if model is ModelFamily.LOG_POWER and m_lo < 2:
        raise InsufficientRange("log_power needs m_lo >= 2 so log2 m stays positive")
    m = series.m_values()
    mask = series.defined & (m >= m_lo) & (m <= m_hi)
    if int(mask.sum()) < 3:
        raise InsufficientRange(
            f"{int(mask.sum())} defined points in [{m_lo}, {m_hi}], need 3"
        )
    x = m[mask].astype(np.float64)
    y = series.values[mask]
    basis = _model_basis(model, x)

    log_y = np.log2(y)
    log_b = np.log2(basis)
    slope, intercept = np.polyfit(log_b, log_y, 1)
    e0 = max(float(slope), 1e-6)
    c0 = float(2.0**intercept)
    init = np.array([c0, e0])
    init_fitted = c0 * basis**e0
    init_ssr = float(np.sum((y - init_fitted) ** 2))

    def residuals(p):
        return p[0] * basis ** p[1] - y

    try:
        res = least_squares(
            residuals,
            init,
            bounds=([1e-12, 1e-9], [np.inf, np.inf]),
            xtol=1e-13,
            ftol=1e-13,
            gtol=1e-13,
            max_nfev=2000,
        )
        scale, exponent = float(res.x[0]), float(res.x[1])
        refined_ssr = float(np.sum(res.fun**2))
    except Exception:
        scale = exponent = float("nan")
        refined_ssr = float("inf")

    if not np.isfinite(refined_ssr) or refined_ssr > init_ssr:
        if not np.isfinite(init_ssr):
            raise NonConvergence("both refinement and initialization failed")
        scale, exponent, fitted = c0, e0, init_fitted
    else:
        fitted = scale * basis**exponent
    return FitResult(
        model=model,
        exponent=exponent,
        scale=scale,
        r_squared=_r_squared(y, fitted),
        fit_range=(m_lo, m_hi),
        n_points=int(mask.sum()),
    )


def compare_models(power: FitResult, log_power: FitResult) -> ModelFamily:
    """Prefer the model with higher R-squared; exact ties go to power."""
    if power.model is not ModelFamily.POWER or log_power.model is not ModelFamily.LOG_POWER:
        raise RangeMismatch("arguments must be a power fit and a log_power fit")
    if power.fit_range != log_power.fit_range or power.n_points != log_power.n_points:
        raise RangeMismatch(
            f"fits cover different data: {power.fit_range}/{power.n_points} vs "
            f"{log_power.fit_range}/{log_power.n_points}"
        )
    return ModelFamily.LOG_POWER if log_power.r_squared > power.r_squared else ModelFamily.POWER


def _max_repetition_of_prefix(codes: np.ndarray, length: int) -> int:
    prefix = np.ascontiguousarray(codes[:length])
    if length <= 1:
        return 0
    compact = np.unique(prefix, return_inverse=True)[1].astype(np.int32)
    sa = backend.suffix_array(compact)
    lcp = backend.lcp_array(compact, sa)
    return int(lcp[1:].max()) if length > 1 else 0


def maxrep_growth_curve(
    text: AnalyzedText, n_points: int = 12, k: int = 5, seed: int = 0
) -> MaxRepCurve:
    """Maximal repetition versus prefix length, smoothed against jitter.

    Nominal prefix lengths are log-spaced between 1000 and n.  Each point
    is the median maximal repetition over k prefix lengths jittered
    uniformly within +-5% of nominal (seeded), which damps the staircase
    noise of extreme statistics.  Medians are clamped to be nondecreasing,
    matching the fact that a prefix's maximal repetition cannot shrink as
    the prefix grows.
    """
    if text.n < 1000:
        raise TextTooShort(f"need n >= 1000, got {text.n}")
    if n_points < 5:
        raise ValueError("n_points must be at least 5")
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be a positive odd count")
    nominals = np.unique(np.rint(np.geomspace(1000, text.n, n_points)).astype(np.int64))
    codes = text.scalar_values()
    rng = SplitMix64(seed)
    lengths: list[int] = []
    medians: list[int] = []
    for nominal in nominals:
        samples = []
        for _ in range(k):
            jitter = 1.0 + 0.05 * (2.0 * rng.next_double() - 1.0)
            length = int(np.clip(round(nominal * jitter), 2, text.n))
            samples.append((length, _max_repetition_of_prefix(codes, length)))
        samples.sort()
        # maximal repetition is monotone over nested prefixes, so the median
        # sample is the evaluation at the median jittered length; record that
        # coherent (length, value) pair
        med_len, med_val = samples[k // 2]
        if lengths and med_len <= lengths[-1]:
            continue
        lengths.append(med_len)
        medians.append(med_val)
    values = np.maximum.accumulate(np.asarray(medians, np.int64))
    return MaxRepCurve(
        lengths=np.asarray(lengths, np.int64), values=values, smoothing_k=k
    )


def fit_eta(curve: MaxRepCurve) -> EtaResult:
    """Growth exponent of maximal repetition: slope of log2 m_max against
    log2 log2 n.

    Returns converged=False (rather than raising) when fewer than 5 points
    have a positive maximal repetition, when either coordinate is constant,
    or when R-squared falls below 0.2; those mirror the estimation failures
    seen in practice with extreme statistics.
    """
    usable = curve.values >= 1
    if int(usable.sum()) < 5:
        return EtaResult(eta=float("nan"), r_squared=float("nan"), converged=False)
    x = np.log2(np.log2(curve.lengths[usable].astype(np.float64)))
    y = np.log2(curve.values[usable].astype(np.float64))
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return EtaResult(eta=float("nan"), r_squared=float("nan"), converged=False)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    r2 = _r_squared(y, fitted)
    return EtaResult(eta=float(slope), r_squared=r2, converged=bool(r2 >= 0.2))
