"""Dataset-level aggregation and two-sample exponent comparison.

Welch's unequal-variance t-test is the comparison tool: its p-values come
from the regularized incomplete beta form of the t CDF, which stays
accurate deep in the tails where dataset separations of interest live.
Summaries report mean/std plus box-plot quartiles per (order, model) over
the texts whose fits converged; failures are counted, never averaged in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .errors import EmptyInput
from .fitting import EtaResult, FitResult, ModelFamily


@dataclass(frozen=True)
class WelchResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float


def welch_from_moments(
    mean_a: float, var_a: float, n_a: int, mean_b: float, var_b: float, n_b: int
) -> WelchResult:
    """Welch's t-test from sample moments (variances with n-1 denominator).

    Degenerate samples follow documented conventions: when both variances
    are zero the test reports p = 1 for equal means and p = 0 (infinite t)
    otherwise, with NaN degrees of freedom.
    """
    if n_a < 2 or n_b < 2:
        raise ValueError("each sample needs at least 2 observations")
    if var_a == 0.0 and var_b == 0.0:
        if mean_a == mean_b:
            return WelchResult(0.0, float("nan"), 1.0)
        t = math.inf if mean_a > mean_b else -math.inf
        return WelchResult(t, float("nan"), 0.0)
    sa = var_a / n_a
    sb = var_b / n_b
    t = (mean_a - mean_b) / math.sqrt(sa + sb)
    dof = (sa + sb) ** 2 / (sa**2 / (n_a - 1) + sb**2 / (n_b - 1))
    # two-sided p from the t CDF via the regularized incomplete beta
    p = float(betainc(dof / 2.0, 0.5, dof / (dof + t * t)))
    return WelchResult(t_statistic=t, degrees_of_freedom=dof, p_value=p)


def welch_t_test(a, b) -> WelchResult:
    """Two-sided Welch t-test between two samples of reals."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 observations")
    return welch_from_moments(
        float(a.mean()), float(a.var(ddof=1)), int(a.size),
        float(b.mean()), float(b.var(ddof=1)), int(b.size),
    )


@dataclass
class TextResult:
    """Everything the batch pipeline keeps for one text."""

    source_id: str
    n: int
    fits: dict[tuple[int, str], FitResult] = field(default_factory=dict)
    preferences: dict[int, str] = field(default_factory=dict)
    eta: EtaResult | None = None
    errors: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SummaryStats:
    """Moments and box-plot quartiles of one exponent population.

    std is the n-1 sample deviation, reported as 0 when only one value
    exists (flagged by n_used = 1).  Whiskers sit at 1.5 IQR beyond the
    quartiles.
    """

    n_used: int
    n_failed: int
    mean: float
    std: float
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    r_squared_mean: float
    r_squared_std: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class DatasetSummary:
    label: str
    n_texts: int
    exponents: dict[tuple[int, str], SummaryStats]
    eta: SummaryStats | None
    prefer_log_power: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n_texts": self.n_texts,
            "exponents": {
                f"alpha={order},model={model}": s.to_dict()
                for (order, model), s in sorted(self.exponents.items())
            },
            "eta": self.eta.to_dict() if self.eta is not None else None,
            "prefer_log_power": {str(k): v for k, v in sorted(self.prefer_log_power.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetSummary":
        exponents = {}
        for key, stats in data["exponents"].items():
            alpha_part, model_part = key.split(",")
            order = int(alpha_part.split("=")[1])
            model = model_part.split("=")[1]
            exponents[(order, model)] = SummaryStats(**stats)
        eta = SummaryStats(**data["eta"]) if data.get("eta") else None
        return cls(
            label=data["label"],
            n_texts=data["n_texts"],
            exponents=exponents,
            eta=eta,
            prefer_log_power={int(k): v for k, v in data["prefer_log_power"].items()},
        )


def _population_stats(values: list[float], r2: list[float], n_failed: int) -> SummaryStats:
    arr = np.asarray(values, dtype=np.float64)
    q1, med, q3 = (float(q) for q in np.percentile(arr, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    r2_arr = np.asarray(r2, dtype=np.float64)
    r2_std = float(r2_arr.std(ddof=1)) if r2_arr.size > 1 else 0.0
    return SummaryStats(
        n_used=int(arr.size),
        n_failed=n_failed,
        mean=float(arr.mean()),
        std=std,
        q1=q1,
        median=med,
        q3=q3,
        whisker_low=q1 - 1.5 * iqr,
        whisker_high=q3 + 1.5 * iqr,
        r_squared_mean=float(r2_arr.mean()) if r2_arr.size else float("nan"),
        r_squared_std=r2_std,
    )


def summarize_dataset(results: list[TextResult], label: str = "dataset") -> DatasetSummary:
    """Aggregate per-text fit results into one dataset summary.

    Means and quartiles cover converged results only; texts whose fit for a
    given (order, model) is missing count toward that cell's failures.  The
    preference count per order is the number of texts where the log_power
    fit beat the power fit.
    """
    if not results:
        raise EmptyInput("no per-text results to summarize")
    n_texts = len(results)
    keys = sorted({key for r in results for key in r.fits})
    exponents: dict[tuple[int, str], SummaryStats] = {}
    for key in keys:
        values = [r.fits[key].exponent for r in results if key in r.fits]
        r2 = [r.fits[key].r_squared for r in results if key in r.fits]
        exponents[key] = _population_stats(values, r2, n_failed=n_texts - len(values))
    orders = sorted({order for order, _ in keys})
    prefer = {
        order: sum(1 for r in results if r.preferences.get(order) == ModelFamily.LOG_POWER.value)
        for order in orders
    }
    eta_vals = [r.eta.eta for r in results if r.eta is not None and r.eta.converged]
    eta_r2 = [r.eta.r_squared for r in results if r.eta is not None and r.eta.converged]
    eta = (
        _population_stats(eta_vals, eta_r2, n_failed=n_texts - len(eta_vals))
        if eta_vals
        else None
    )
    return DatasetSummary(
        label=label,
        n_texts=n_texts,
        exponents=exponents,
        eta=eta,
        prefer_log_power=prefer,
    )
