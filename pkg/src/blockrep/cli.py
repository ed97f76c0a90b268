"""Command-line front end.

Subcommands mirror the pipeline stages:

    analyze     one text -> block stats, spectra, model fits
    batch       a directory or manifest -> per-text table plus summary
    compare     two batch summaries -> Welch tests per exponent
    generate    seeded synthetic text (bernoulli) or a shuffle of a file
    maxrep      maximal-repetition growth curve and its exponent
    preprocess  raw .txt directory -> normalized texts plus manifest
    llm-gen     drive a chat-completions endpoint to produce one long text

Exit codes: 0 success, 1 I/O or environment trouble, 2 contract violations
(degenerate input, mismatched schemas).  All outputs are deterministic for
fixed inputs, flags and seeds; numbers serialize identically in csv and
json (shortest round-trip float form).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .corpus import (
    CorpusManifest,
    GenerationConfig,
    bernoulli_sequence,
    llm_generate,
    preprocess_directory,
    shuffle_text,
)
from .counting import AnalyzedText, NormalizationOptions, normalize_text
from .errors import BlockrepError
from .fitting import fit_eta, maxrep_growth_curve
from .pipeline import (
    AnalysisConfig,
    TextAnalysis,
    analyze_text,
    config_for_worker,
    spectrum_rows,
    to_text_result,
)
from .stats import DatasetSummary, TextResult, summarize_dataset, welch_from_moments

SCHEMA = "blockrep-schema v1"

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONTRACT = 2


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if value != value else repr(value)
    return str(value)


def _write_csv(path: Path, kind: str, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {SCHEMA} kind={kind}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, kind: str, payload) -> None:
    doc = {"schema": f"{SCHEMA} kind={kind}", "data": payload}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False, sort_keys=True)
        fh.write("\n")


def _norm_options(args) -> NormalizationOptions:
    return NormalizationOptions(
        strip_boilerplate=getattr(args, "strip_boilerplate", False),
        lowercase=getattr(args, "lowercase", False),
        drop_punctuation=getattr(args, "drop_punctuation", False),
    )


def _load_text(path: Path, options: NormalizationOptions) -> AnalyzedText:
    return normalize_text(path.read_bytes(), options, source_id=path.stem)


def _config_from_args(args, with_eta: bool) -> AnalysisConfig:
    orders = tuple(sorted(set(args.alpha))) if args.alpha else (2, 3, 4)
    return AnalysisConfig(
        orders=orders,
        m_cap=args.m_cap,
        min_eligible_types=args.fit_min_types,
        normalization=_norm_options(args),
        seed=args.seed,
        output_format=args.format,
        workers=args.workers,
        with_eta=with_eta and not getattr(args, "no_eta", False),
        eta_points=getattr(args, "eta_points", 12),
        eta_k=getattr(args, "eta_k", 5),
    )


# ---------------------------------------------------------------- analyze

_BLOCKSTATS_HEADER = ["m", "total_blocks", "distinct_types", "repetitions"]
_SPECTRUM_HEADER = ["alpha", "m", "entropy_bits", "lambda", "delta_bits", "corrected_bits"]
_FITS_HEADER = [
    "alpha", "model", "exponent", "scale", "r_squared", "m_lo", "m_hi", "n_points", "preferred",
]


def _blockstats_rows(analysis: TextAnalysis) -> list[tuple]:
    s = analysis.stats
    return [
        (int(m), int(t), int(k), int(d))
        for m, t, k, d in zip(s.m_values(), s.totals, s.types, s.repeats)
    ]


def _fit_rows(analysis: TextAnalysis) -> list[tuple]:
    rows = []
    for (order, model), fit in sorted(analysis.fits.items()):
        rows.append(
            (
                order,
                model,
                fit.exponent,
                fit.scale,
                fit.r_squared,
                fit.fit_range[0],
                fit.fit_range[1],
                fit.n_points,
                analysis.preferences.get(order, ""),
            )
        )
    return rows


def cmd_analyze(args) -> int:
    path = Path(args.path)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = _config_from_args(args, with_eta=False)
    text = _load_text(path, config.normalization)
    analysis = analyze_text(text, config)
    stem = path.stem
    if config.output_format == "csv":
        _write_csv(out_dir / f"{stem}.blockstats.csv", "blockstats", _BLOCKSTATS_HEADER,
                   _blockstats_rows(analysis))
        _write_csv(out_dir / f"{stem}.spectrum.csv", "spectrum", _SPECTRUM_HEADER,
                   spectrum_rows(analysis))
        _write_csv(out_dir / f"{stem}.fits.csv", "fits", _FITS_HEADER, _fit_rows(analysis))
    else:
        payload = {
            "source_id": analysis.source_id,
            "n": analysis.n,
            "blockstats": [dict(zip(_BLOCKSTATS_HEADER, r)) for r in _blockstats_rows(analysis)],
            "spectrum": [dict(zip(_SPECTRUM_HEADER, r)) for r in spectrum_rows(analysis)],
            "fits": [dict(zip(_FITS_HEADER, r)) for r in _fit_rows(analysis)],
            "errors": analysis.errors,
        }
        _write_json(out_dir / f"{stem}.analysis.json", "analysis", payload)
    for stage, message in sorted(analysis.errors.items()):
        print(f"{path.name}: {stage}: {message}", file=sys.stderr)
    if not analysis.fits:
        return EXIT_CONTRACT
    return EXIT_OK


# ------------------------------------------------------------------ batch

_PER_TEXT_HEADER = [
    "source_id", "n", "alpha", "beta", "r2_power", "gamma", "r2_log_power",
    "preferred", "eta", "eta_r_squared", "eta_converged", "error",
]


def _batch_worker(job: tuple[str, str, AnalysisConfig]) -> TextResult:
    path_str, source_id, config = job
    try:
        text = normalize_text(
            Path(path_str).read_bytes(), config.normalization, source_id=source_id
        )
        return to_text_result(analyze_text(text, config))
    except (BlockrepError, OSError) as exc:
        # a broken text never aborts the batch; it becomes a recorded failure
        return TextResult(
            source_id=source_id, n=0, errors={"load": f"{type(exc).__name__}: {exc}"}
        )


def _discover_inputs(dataset: Path) -> list[tuple[str, str]]:
    """(path, source_id) pairs from a directory of .txt or a manifest csv."""
    if dataset.is_dir():
        return [(str(p), p.stem) for p in sorted(dataset.glob("*.txt"))]
    manifest = CorpusManifest.load(dataset)
    return [(e.path, e.source_id) for e in manifest.entries]


def _per_text_rows(results: list[TextResult], orders: tuple[int, ...]) -> list[tuple]:
    rows = []
    for r in sorted(results, key=lambda item: item.source_id):
        eta_val = r.eta.eta if r.eta is not None and r.eta.converged else None
        eta_r2 = r.eta.r_squared if r.eta is not None and r.eta.converged else None
        eta_ok = bool(r.eta.converged) if r.eta is not None else False
        for order in orders:
            power_fit = r.fits.get((order, "power"))
            lp_fit = r.fits.get((order, "log_power"))
            error = r.errors.get(f"alpha={order}") or r.errors.get("load") or ""
            rows.append(
                (
                    r.source_id,
                    r.n,
                    order,
                    power_fit.exponent if power_fit else None,
                    power_fit.r_squared if power_fit else None,
                    lp_fit.exponent if lp_fit else None,
                    lp_fit.r_squared if lp_fit else None,
                    r.preferences.get(order, ""),
                    eta_val,
                    eta_r2,
                    eta_ok,
                    error,
                )
            )
    return rows


def cmd_batch(args) -> int:
    dataset = Path(args.dataset)
    out_dir = Path(args.out)
    config = _config_from_args(args, with_eta=True)
    inputs = _discover_inputs(dataset)
    if not inputs:
        print(f"no input texts found in {dataset}", file=sys.stderr)
        return EXIT_CONTRACT
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(path, source_id, config_for_worker(config)) for path, source_id in inputs]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_batch_worker, jobs))
    else:
        results = [_batch_worker(job) for job in jobs]
    results.sort(key=lambda r: r.source_id)
    rows = _per_text_rows(results, config.orders)
    label = args.label or dataset.stem
    summary = summarize_dataset(results, label=label)
    if config.output_format == "csv":
        _write_csv(out_dir / "per_text.csv", "per-text", _PER_TEXT_HEADER, rows)
    else:
        _write_json(
            out_dir / "per_text.json",
            "per-text",
            [dict(zip(_PER_TEXT_HEADER, r)) for r in rows],
        )
    _write_json(out_dir / "summary.json", "summary", summary.to_dict())
    failed = [r.source_id for r in results if r.errors]
    for source_id in failed:
        r = next(x for x in results if x.source_id == source_id)
        for stage, message in sorted(r.errors.items()):
            print(f"{source_id}: {stage}: {message}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- compare

_COMPARE_HEADER = ["alpha", "exponent", "t_statistic", "degrees_of_freedom", "p_value"]

_EXPONENT_NAME = {"power": "beta", "log_power": "gamma"}


def _load_summary(path: Path) -> DatasetSummary:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return DatasetSummary.from_dict(doc["data"])


def cmd_compare(args) -> int:
    summary_a = _load_summary(Path(args.summary_a))
    summary_b = _load_summary(Path(args.summary_b))
    keys_a = set(summary_a.exponents)
    keys_b = set(summary_b.exponents)
    if keys_a != keys_b:
        print(
            f"summaries cover different (alpha, model) sets: "
            f"{sorted(keys_a)} vs {sorted(keys_b)}",
            file=sys.stderr,
        )
        return EXIT_CONTRACT
    rows = []
    for order, model in sorted(keys_a):
        stats_a = summary_a.exponents[(order, model)]
        stats_b = summary_b.exponents[(order, model)]
        if stats_a.n_used < 2 or stats_b.n_used < 2:
            print(f"alpha={order} {model}: too few texts for a test", file=sys.stderr)
            return EXIT_CONTRACT
        welch = welch_from_moments(
            stats_a.mean, stats_a.std**2, stats_a.n_used,
            stats_b.mean, stats_b.std**2, stats_b.n_used,
        )
        rows.append(
            (order, _EXPONENT_NAME[model], welch.t_statistic,
             welch.degrees_of_freedom, welch.p_value)
        )
    if summary_a.eta is not None and summary_b.eta is not None:
        if summary_a.eta.n_used >= 2 and summary_b.eta.n_used >= 2:
            welch = welch_from_moments(
                summary_a.eta.mean, summary_a.eta.std**2, summary_a.eta.n_used,
                summary_b.eta.mean, summary_b.eta.std**2, summary_b.eta.n_used,
            )
            rows.append(
                (None, "eta", welch.t_statistic, welch.degrees_of_freedom, welch.p_value)
            )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        _write_csv(out, "welch", _COMPARE_HEADER, rows)
    else:
        clean = [
            {k: (None if isinstance(v, float) and v != v else v)
             for k, v in zip(_COMPARE_HEADER, row)}
            for row in rows
        ]
        _write_json(out, "welch", clean)
    return EXIT_OK


# --------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "bernoulli":
        text = bernoulli_sequence(args.n, args.p, args.seed)
        meta = {"kind": "bernoulli", "n": args.n, "p": args.p, "seed": args.seed}
    else:
        source = _load_text(Path(args.input), NormalizationOptions())
        text = shuffle_text(source, args.seed)
        meta = {"kind": "shuffle", "input": str(args.input), "seed": args.seed}
    out.write_text(text.symbols, encoding="utf-8", newline="\n")
    meta.update({"source_id": text.source_id, "provenance": text.provenance.value, "n": text.n})
    _write_json(out.with_suffix(out.suffix + ".meta.json"), "generate-meta", meta)
    return EXIT_OK


# ----------------------------------------------------------------- maxrep

_MAXREP_HEADER = ["prefix_length", "max_repetition"]


def cmd_maxrep(args) -> int:
    path = Path(args.path)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = _load_text(path, _norm_options(args))
    curve = maxrep_growth_curve(text, n_points=args.n_points, k=args.k, seed=args.seed)
    eta = fit_eta(curve)
    points = [(int(n), int(v)) for n, v in zip(curve.lengths, curve.values)]
    eta_payload = {
        "eta": None if eta.eta != eta.eta else eta.eta,
        "r_squared": None if eta.r_squared != eta.r_squared else eta.r_squared,
        "converged": eta.converged,
        "n_points": args.n_points,
        "k": args.k,
        "seed": args.seed,
    }
    stem = path.stem
    if args.format == "csv":
        _write_csv(out_dir / f"{stem}.maxrep.csv", "maxrep", _MAXREP_HEADER, points)
        _write_json(out_dir / f"{stem}.eta.json", "eta", eta_payload)
    else:
        payload = {"points": [dict(zip(_MAXREP_HEADER, p)) for p in points], "eta": eta_payload}
        _write_json(out_dir / f"{stem}.maxrep.json", "maxrep", payload)
    return EXIT_OK


# ------------------------------------------------------------- preprocess

def cmd_preprocess(args) -> int:
    options = NormalizationOptions(
        strip_boilerplate=not args.keep_boilerplate,
        lowercase=args.lowercase,
        drop_punctuation=args.drop_punctuation,
    )
    manifest, problems = preprocess_directory(
        args.raw_dir, args.out_dir, options, label=args.label
    )
    for line in problems:
        print(f"warning: {line}", file=sys.stderr)
    if not manifest.entries:
        print("no files could be preprocessed", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


# ----------------------------------------------------------------- llm-gen

def cmd_llm_gen(args) -> int:
    config = GenerationConfig.from_json(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config.archive_dir = str(out_dir)
    text = llm_generate(config, args.label)
    out_path = out_dir / f"{args.label}.txt"
    out_path.write_text(text.symbols, encoding="utf-8", newline="\n")
    _write_json(
        out_dir / f"{args.label}.meta.json",
        "llm-gen-meta",
        {
            "source_id": text.source_id,
            "provenance": text.provenance.value,
            "n": text.n,
            "model": config.model,
            "num_parts": config.num_parts,
            "target_tokens": config.target_tokens,
        },
    )
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_common_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=int, action="append",
                        help="entropy order, repeatable (default: 2 3 4)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=max(1, os.cpu_count() or 1))
    parser.add_argument("--m-cap", type=int, default=None,
                        help="block-length cap (default: maximal repetition + 1)")
    parser.add_argument("--fit-min-types", type=int, default=10,
                        help="minimum contributing types for a length to enter the fit range")
    parser.add_argument("--strip-boilerplate", action="store_true")
    parser.add_argument("--lowercase", action="store_true")
    parser.add_argument("--drop-punctuation", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockrep",
        description="Repeated-block statistics and entropy-growth model fitting for long texts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a single text file")
    p.add_argument("path")
    p.add_argument("--out", required=True, help="output directory")
    _add_common_analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("batch", help="analyze a directory of texts or a manifest")
    p.add_argument("dataset", help="directory of .txt files or a manifest csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--label", default=None, help="dataset label (default: directory name)")
    p.add_argument("--no-eta", action="store_true", help="skip maximal-repetition fits")
    p.add_argument("--eta-points", type=int, default=12)
    p.add_argument("--eta-k", type=int, default=5)
    _add_common_analysis_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("compare", help="Welch tests between two batch summaries")
    p.add_argument("summary_a")
    p.add_argument("summary_b")
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", help="write a synthetic or shuffled text")
    p.add_argument("kind", choices=("bernoulli", "shuffle"))
    p.add_argument("--out", required=True, help="output text file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1_000_000, help="bernoulli length")
    p.add_argument("--p", type=float, default=0.5, help="bernoulli bias")
    p.add_argument("--input", help="text file to shuffle")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("maxrep", help="maximal-repetition growth curve and exponent")
    p.add_argument("path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-points", type=int, default=12)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--strip-boilerplate", action="store_true")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--drop-punctuation", action="store_true")
    p.set_defaults(func=cmd_maxrep)

    p = sub.add_parser("preprocess", help="normalize a directory of raw .txt files")
    p.add_argument("raw_dir")
    p.add_argument("out_dir")
    p.add_argument("--label", default="dataset")
    p.add_argument("--keep-boilerplate", action="store_true",
                   help="do not strip header/footer sentinels")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--drop-punctuation", action="store_true")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("llm-gen", help="generate one long text via a chat endpoint")
    p.add_argument("--config", required=True, help="GenerationConfig as json")
    p.add_argument("--label", required=True, help="output name / source id")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_llm_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BlockrepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
