"""blockrep: repeated-block statistics and entropy-growth diagnostics.

Counts repeated blocks of every length in a text exactly, turns the counts
into higher-order entropy spectra with finite-size corrections, and fits
competing growth models (power versus log-power) whose exponents separate
differently structured sources.
"""

from .backend import ACTIVE_BACKEND
from .counting import (
    AnalyzedText,
    BlockStatsSeries,
    NormalizationOptions,
    PowerSumSeries,
    Provenance,
    SubstringIndex,
    block_stats,
    build_index,
    max_repetition,
    normalize_text,
    power_sums,
)
from .corpus import (
    CorpusManifest,
    GenerationConfig,
    ManifestEntry,
    bernoulli_sequence,
    length_matched_sample,
    llm_generate,
    shuffle_text,
)
from .entropy import (
    CorrectedSeries,
    EntropySpectrum,
    LambdaSeries,
    corrected_series,
    delta_correction,
    expected_repeat_fraction,
    lambda_series,
    renyi_spectrum,
    repetition_fraction_to_lambda,
)
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
from .pipeline import AnalysisConfig, TextAnalysis, analyze_text
from .stats import (
    DatasetSummary,
    SummaryStats,
    TextResult,
    WelchResult,
    summarize_dataset,
    welch_t_test,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND",
    "AnalysisConfig",
    "AnalyzedText",
    "BlockStatsSeries",
    "CorpusManifest",
    "CorrectedSeries",
    "DatasetSummary",
    "EntropySpectrum",
    "EtaResult",
    "FitResult",
    "GenerationConfig",
    "LambdaSeries",
    "ManifestEntry",
    "MaxRepCurve",
    "ModelFamily",
    "NormalizationOptions",
    "PowerSumSeries",
    "Provenance",
    "SubstringIndex",
    "SummaryStats",
    "TextAnalysis",
    "TextResult",
    "WelchResult",
    "analyze_text",
    "bernoulli_sequence",
    "block_stats",
    "build_index",
    "compare_models",
    "corrected_series",
    "delta_correction",
    "expected_repeat_fraction",
    "fit_eta",
    "fit_model",
    "lambda_series",
    "length_matched_sample",
    "llm_generate",
    "max_repetition",
    "maxrep_growth_curve",
    "normalize_text",
    "power_sums",
    "renyi_spectrum",
    "repetition_fraction_to_lambda",
    "select_fit_range",
    "shuffle_text",
    "summarize_dataset",
    "welch_t_test",
]
