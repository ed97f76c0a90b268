"""End-to-end orchestration: text in, counts, spectra and fits out.

One `analyze_text` call runs the whole chain for a single text: index
construction, block statistics, per-order power sums and spectra, occupancy
estimation, corrected series, fit-range selection, both model fits and the
preference.  Per-order failures (degenerate or too-short texts) are recorded
rather than raised so batch runs never abort on one bad input.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .counting import (
    AnalyzedText,
    BlockStatsSeries,
    NormalizationOptions,
    PowerSumSeries,
    block_stats,
    build_index,
    power_sums,
)
from .entropy import (
    CorrectedSeries,
    EntropySpectrum,
    LambdaSeries,
    corrected_series,
    delta_correction,
    lambda_series,
    renyi_spectrum,
)
from .errors import BlockrepError
from .fitting import (
    EtaResult,
    FitResult,
    MaxRepCurve,
    ModelFamily,
    compare_models,
    fit_eta,
    fit_model,
    maxrep_growth_curve,
    select_fit_range,
)
from .stats import TextResult

SUPPORTED_ORDERS = (2, 3, 4)


@dataclass
class AnalysisConfig:
    """Knobs for a single-text or batch analysis run."""

    orders: tuple[int, ...] = SUPPORTED_ORDERS
    m_cap: int | None = None
    min_eligible_types: int = 10
    fit_range_override: tuple[int, int] | None = None
    normalization: NormalizationOptions = field(default_factory=NormalizationOptions)
    seed: int = 0
    output_format: str = "csv"
    workers: int = 1
    with_eta: bool = True
    eta_points: int = 12
    eta_k: int = 5

    def __post_init__(self):
        bad = [a for a in self.orders if a not in SUPPORTED_ORDERS]
        if bad:
            raise ValueError(f"unsupported orders {bad}; choose from {SUPPORTED_ORDERS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output format must be csv or json")


@dataclass
class TextAnalysis:
    """Full per-text result bundle."""

    source_id: str
    n: int
    stats: BlockStatsSeries
    lambdas: LambdaSeries
    power: dict[int, PowerSumSeries]
    spectra: dict[int, EntropySpectrum]
    corrected: dict[int, CorrectedSeries]
    fit_ranges: dict[int, tuple[int, int]]
    fits: dict[tuple[int, str], FitResult]
    preferences: dict[int, str]
    eta_curve: MaxRepCurve | None = None
    eta: EtaResult | None = None
    errors: dict[str, str] = field(default_factory=dict)


def analyze_text(text: AnalyzedText, config: AnalysisConfig | None = None) -> TextAnalysis:
    config = config or AnalysisConfig()
    index = build_index(text)
    stats = block_stats(index, config.m_cap)
    lambdas = lambda_series(stats)
    result = TextAnalysis(
        source_id=text.source_id,
        n=text.n,
        stats=stats,
        lambdas=lambdas,
        power={},
        spectra={},
        corrected={},
        fit_ranges={},
        fits={},
        preferences={},
    )
    for order in config.orders:
        power = power_sums(index, order, config.m_cap)
        spectrum = renyi_spectrum(power, stats)
        corrected = corrected_series(spectrum, lambdas)
        result.power[order] = power
        result.spectra[order] = spectrum
        result.corrected[order] = corrected
        try:
            if config.fit_range_override is not None:
                fit_range = config.fit_range_override
            else:
                fit_range = select_fit_range(
                    stats, power, min_eligible_types=config.min_eligible_types
                )
            power_fit = fit_model(corrected, ModelFamily.POWER, fit_range)
            lp_fit = fit_model(corrected, ModelFamily.LOG_POWER, fit_range)
            result.fit_ranges[order] = fit_range
            result.fits[(order, ModelFamily.POWER.value)] = power_fit
            result.fits[(order, ModelFamily.LOG_POWER.value)] = lp_fit
            result.preferences[order] = compare_models(power_fit, lp_fit).value
        except BlockrepError as exc:
            result.errors[f"alpha={order}"] = f"{type(exc).__name__}: {exc}"
    if config.with_eta:
        try:
            curve = maxrep_growth_curve(
                text, n_points=config.eta_points, k=config.eta_k, seed=config.seed
            )
            result.eta_curve = curve
            result.eta = fit_eta(curve)
        except BlockrepError as exc:
            result.errors["eta"] = f"{type(exc).__name__}: {exc}"
    return result


def to_text_result(analysis: TextAnalysis) -> TextResult:
    """Reduce a full analysis to the per-text record that batches keep."""
    return TextResult(
        source_id=analysis.source_id,
        n=analysis.n,
        fits=dict(analysis.fits),
        preferences=dict(analysis.preferences),
        eta=analysis.eta,
        errors=dict(analysis.errors),
    )


def spectrum_rows(analysis: TextAnalysis) -> list[tuple]:
    """Rows (order, m, entropy, lambda, delta, corrected) for serialization.

    Undefined entries are None so CSV cells stay empty and JSON gets null.
    """
    rows: list[tuple] = []
    lam = analysis.lambdas
    for order in sorted(analysis.spectra):
        spectrum = analysis.spectra[order]
        corr = analysis.corrected[order]
        for i, m in enumerate(spectrum.m_values()):
            h = float(spectrum.values[i]) if spectrum.defined[i] else None
            if lam.defined[i]:
                lam_v = float(lam.values[i])
                delta = float(delta_correction(order, lam_v))
            else:
                lam_v = delta = None
            y = float(corr.values[i]) if corr.defined[i] else None
            if h is None and lam_v is None:
                continue
            rows.append((order, int(m), h, lam_v, delta, y))
    return rows


def config_for_worker(config: AnalysisConfig) -> AnalysisConfig:
    """Per-text jobs always run single-threaded inside a worker."""
    return replace(config, workers=1)
