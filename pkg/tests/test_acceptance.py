"""Acceptance gate: one test per criterion, each printing a PASS line and
enforcing its stated tolerance and time budget (run with -v -s to watch).

The two novel-based criteria need the public-domain fixture at
tests/data/hermit_of_far_end.txt; when it is absent the tests try a quick
download (scripts/fetch_novel.py) and otherwise skip with instructions.
"""

import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import blockrep as br
from blockrep.cli import main as cli_main
from blockrep.pipeline import AnalysisConfig, analyze_text
from blockrep.rng import splitmix_stream, uniform_doubles
from oracle import brute_max_repetition, brute_power_sum, brute_stats

REPO_ROOT = Path(__file__).resolve().parent.parent
NOVEL_PATH = REPO_ROOT / "tests" / "data" / "hermit_of_far_end.txt"


def _stopwatch():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start


# ------------------------------------------------------------ criterion 1

def test_c01_banana_exactness():
    # warm pass excluded from the timed one (kernels already compiled)
    br.block_stats(br.build_index(br.AnalyzedText("banana")), 2)
    elapsed = _stopwatch()
    stats = br.block_stats(br.build_index(br.AnalyzedText("banana")), 2)
    took = elapsed()
    assert int(stats.totals[1]) == 5
    assert int(stats.types[1]) == 3
    assert int(stats.repeats[1]) == 2
    assert took < 1e-3, f"took {took * 1e3:.3f} ms"
    print(f"\nACCEPTANCE C1 PASS: banana counts exact in {took * 1e6:.0f} us")


# ------------------------------------------------------------ criterion 2

def test_c02_oracle_equivalence_100_strings():
    elapsed = _stopwatch()
    rng = np.random.default_rng(777)
    letters = "abcdefghijklmnopqrstuvwxyz"
    for trial in range(100):
        sigma = int(rng.integers(2, 27))
        n = int(rng.integers(2, 2001))
        s = "".join(letters[i] for i in rng.integers(0, sigma, n))
        idx = br.build_index(br.AnalyzedText(s, source_id=f"r{trial}"))
        assert br.max_repetition(idx) == brute_max_repetition(s)
        cap = min(n, br.max_repetition(idx) + 3)
        stats = br.block_stats(idx, cap)
        sums = {order: br.power_sums(idx, order, cap) for order in (2, 3, 4)}
        for i, m in enumerate(range(1, cap + 1)):
            totals, types, repeats = brute_stats(s, m)
            assert int(stats.types[i]) == types
            assert int(stats.repeats[i]) == repeats
            for order in (2, 3, 4):
                value, eligible = brute_power_sum(s, m, order)
                assert sums[order].values[i] == value
                assert int(sums[order].eligible_types[i]) == eligible
    took = elapsed()
    assert took < 60.0
    print(f"\nACCEPTANCE C2 PASS: 100 random strings match brute force in {took:.1f} s")


# ------------------------------------------------------------ criterion 3

def test_c03_bernoulli_calibration_slope():
    """Spectrum slope 1.00 +- 0.03 over m in [10, 30] at n = 1e6.

    Implemented exactly as stated.  See the supporting diagnostic below
    (test_c03_diagnostic_*) for where the estimator does track unit slope.
    """
    elapsed = _stopwatch()
    text = br.bernoulli_sequence(10**6, 0.5, 42)
    idx = br.build_index(text)
    stats = br.block_stats(idx)
    slopes = {}
    for order in (2, 3, 4):
        spectrum = br.renyi_spectrum(br.power_sums(idx, order), stats)
        m = spectrum.m_values()
        mask = spectrum.defined & (m >= 10) & (m <= 30)
        slopes[order] = float(np.polyfit(m[mask].astype(float), spectrum.values[mask], 1)[0])
    took = elapsed()
    assert took < 60.0
    print(f"\nACCEPTANCE C3 slopes over m in [10, 30]: "
          + ", ".join(f"alpha={o}: {s:.4f}" for o, s in slopes.items()))
    for order, slope in slopes.items():
        assert slope == pytest.approx(1.0, abs=0.03), (
            f"alpha={order}: slope {slope:.4f} outside 1.00 +- 0.03"
        )
    print(f"ACCEPTANCE C3 PASS: calibration slopes within 1.00 +- 0.03 in {took:.1f} s")


def test_c03_diagnostic_unit_slope_outside_saturation():
    """Where the thresholded spectrum is not yet saturating (block lengths
    clear of the birthday region), the coin-flip slope is 1 as predicted."""
    text = br.bernoulli_sequence(10**6, 0.5, 42)
    idx = br.build_index(text)
    stats = br.block_stats(idx)
    for order in (2, 3, 4):
        spectrum = br.renyi_spectrum(br.power_sums(idx, order), stats)
        m = spectrum.m_values()
        mask = spectrum.defined & (m >= 10) & (m <= 15)
        slope = float(np.polyfit(m[mask].astype(float), spectrum.values[mask], 1)[0])
        assert slope == pytest.approx(1.0, abs=0.03)
    print("\nACCEPTANCE C3 diagnostic: unit slope holds over m in [10, 15]")


# ------------------------------------------------------------ criterion 4

def test_c04_lambda_inversion():
    elapsed = _stopwatch()
    for r in np.geomspace(1e-6, 1 - 1e-6, 1000):
        lam = br.repetition_fraction_to_lambda(float(r))
        assert abs(br.expected_repeat_fraction(lam) - r) <= 1e-10
    for lam in np.geomspace(1e-4, 1e4, 1000):
        r = br.expected_repeat_fraction(float(lam))
        back = br.repetition_fraction_to_lambda(r)
        assert abs(back - lam) / lam <= 1e-6
    took = elapsed()
    assert took < 1.0
    print(f"\nACCEPTANCE C4 PASS: inversion residual <= 1e-10 and round trip "
          f"<= 1e-6 in {took * 1e3:.0f} ms")


# ------------------------------------------------------------ criterion 5

def test_c05_delta_spot_values():
    assert abs(br.delta_correction(2, 1.0) - 1.0) <= 1e-12
    assert abs(br.delta_correction(3, 1.0) - 0.5 * math.log2(5)) <= 1e-12
    assert abs(br.delta_correction(4, 1.0) - math.log2(15) / 3) <= 1e-12
    print("\nACCEPTANCE C5 PASS: correction spot values exact to 1e-12")


# ------------------------------------------------------------ criterion 6

def test_c06_fit_recovery():
    from blockrep import CorrectedSeries

    def series(fn, noise, seed):
        m = np.arange(1, 201)
        values = np.full(200, np.nan)
        defined = np.zeros(200, bool)
        sel = m >= 2
        values[sel] = fn(m[sel].astype(float))
        if noise:
            gen = np.random.default_rng(seed)
            values[sel] *= 1.0 + noise * gen.standard_normal(int(sel.sum()))
        defined[sel] = True
        return CorrectedSeries(n=10**6, m_cap=200, order=2, values=values, defined=defined)

    elapsed = _stopwatch()
    targets = {
        br.ModelFamily.POWER: (lambda m: 3.0 * m**0.4, 0.4),
        br.ModelFamily.LOG_POWER: (lambda m: 2.0 * np.log2(m) ** 0.9, 0.9),
    }
    for model, (fn, true_exponent) in targets.items():
        clean = br.fit_model(series(fn, 0.0, 0), model, (2, 200))
        assert abs(clean.exponent - true_exponent) <= 1e-3
        recovered = [
            br.fit_model(series(fn, 0.01, seed), model, (2, 200)).exponent
            for seed in range(100)
        ]
        assert abs(float(np.mean(recovered)) - true_exponent) <= 0.02
    took = elapsed()
    assert took < 30.0
    print(f"\nACCEPTANCE C6 PASS: exponents recovered (noiseless 1e-3, "
          f"noisy mean 0.02) in {took:.1f} s")


# ----------------------------------------------------- novel fixture plumbing

def _ensure_novel() -> br.AnalyzedText:
    if not NOVEL_PATH.exists():
        fetch = REPO_ROOT / "scripts" / "fetch_novel.py"
        try:
            subprocess.run(
                [sys.executable, str(fetch), "--out", str(NOVEL_PATH), "--timeout", "20"],
                timeout=90,
                check=True,
                capture_output=True,
            )
        except Exception:
            pytest.skip(
                "novel fixture unavailable and download failed; run "
                "scripts/fetch_novel.py with network access to enable this check"
            )
    raw = NOVEL_PATH.read_bytes()
    return br.normalize_text(
        raw,
        br.NormalizationOptions(strip_boilerplate=True),
        source_id="hermit_of_far_end",
    )


# ------------------------------------------------------------ criterion 7

def test_c07_novel_log_power_preference():
    elapsed = _stopwatch()
    text = _ensure_novel()
    assert 4 * 10**5 < text.n < 8 * 10**5  # roughly 586,533 after cleanup
    analysis = analyze_text(text, AnalysisConfig(with_eta=False))
    for order in (2, 3, 4):
        power = analysis.fits[(order, "power")]
        log_power = analysis.fits[(order, "log_power")]
        assert log_power.r_squared > power.r_squared, f"alpha={order}"
        assert log_power.r_squared >= 0.95, f"alpha={order}: {log_power.r_squared:.4f}"
    gamma = analysis.fits[(2, "log_power")].exponent
    beta = analysis.fits[(2, "power")].exponent
    assert 0.7 <= gamma <= 1.1, f"gamma={gamma:.3f}"
    assert 0.25 <= beta <= 0.55, f"beta={beta:.3f}"
    took = elapsed()
    assert took < 300.0
    print(f"\nACCEPTANCE C7 PASS: novel prefers log-power (gamma={gamma:.3f}, "
          f"beta={beta:.3f}) in {took:.1f} s")


# ------------------------------------------------------------ criterion 8

def test_c08_shuffle_eta_baseline():
    elapsed = _stopwatch()
    text = _ensure_novel()
    shuffled = br.shuffle_text(text, 2024)
    eta_shuffled = br.fit_eta(br.maxrep_growth_curve(shuffled, n_points=12, k=5, seed=0))
    eta_original = br.fit_eta(br.maxrep_growth_curve(text, n_points=12, k=5, seed=0))
    assert eta_shuffled.converged
    assert 0.85 <= eta_shuffled.eta <= 1.3, f"shuffled eta={eta_shuffled.eta:.3f}"
    assert eta_original.converged
    assert 1.9 <= eta_original.eta <= 2.9, f"original eta={eta_original.eta:.3f}"
    took = elapsed()
    assert took < 300.0
    print(f"\nACCEPTANCE C8 PASS: eta shuffled={eta_shuffled.eta:.2f}, "
          f"original={eta_original.eta:.2f} in {took:.1f} s")


# ------------------------------------------------------------ criterion 9

def test_c09_welch_correctness():
    elapsed = _stopwatch()
    same = br.welch_t_test([0.3, 0.4, 0.5, 0.6], [0.3, 0.4, 0.5, 0.6])
    assert same.t_statistic == 0.0 and same.p_value == 1.0
    hand = br.welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert hand.t_statistic == pytest.approx(-1.0, abs=1e-12)
    assert hand.degrees_of_freedom == pytest.approx(8.0, abs=1e-12)
    # independent reference: numeric quadrature of the t density at 8 dof
    from scipy.integrate import quad

    dof = 8.0
    norm = math.gamma((dof + 1) / 2) / (math.sqrt(dof * math.pi) * math.gamma(dof / 2))
    tail, err = quad(lambda x: norm * (1 + x * x / dof) ** (-(dof + 1) / 2), -np.inf, -1.0)
    assert err < 1e-10
    assert hand.p_value == pytest.approx(2 * tail, abs=1e-6)
    took = elapsed()
    assert took < 1.0
    print(f"\nACCEPTANCE C9 PASS: t=-1, dof=8, p={hand.p_value:.6f} "
          f"(quadrature reference {2 * tail:.6f}) in {took * 1e3:.0f} ms")


# ------------------------------------------------------------ criterion 10

def _loop_text_symbols(n: int, base_len: int, seed: int) -> str:
    bits = uniform_doubles(splitmix_stream(seed, base_len))
    base = "".join("1" if u < 0.5 else "0" for u in bits)
    reps = n // base_len + 1
    return (base * reps)[:n]


def test_c10_pipeline_population_separation(tmp_path):
    """Full pipeline stand-in for the large corpus study: two synthetic
    populations with shifted exponent means must separate at p < 1e-6,
    and a population compared with itself must give p = 1 exactly."""
    flips_dir = tmp_path / "flips"
    loops_dir = tmp_path / "loops"
    flips_dir.mkdir()
    loops_dir.mkdir()
    for i in range(12):
        assert cli_main([
            "generate", "bernoulli", "--n", "50000", "--p", "0.5",
            "--seed", str(100 + i), "--out", str(flips_dir / f"flip{i:02d}.txt"),
        ]) == 0
        (loops_dir / f"loop{i:02d}.txt").write_text(
            _loop_text_symbols(50_000, 512, 200 + i), encoding="utf-8"
        )
    out_a = tmp_path / "batch_flips"
    out_b = tmp_path / "batch_loops"
    for dataset, out in ((flips_dir, out_a), (loops_dir, out_b)):
        assert cli_main([
            "batch", str(dataset), "--out", str(out), "--seed", "1",
            "--workers", "2", "--eta-points", "8",
        ]) == 0
    welch_path = tmp_path / "welch.json"
    assert cli_main([
        "compare", str(out_a / "summary.json"), str(out_b / "summary.json"),
        "--out", str(welch_path), "--format", "json",
    ]) == 0
    rows = json.loads(welch_path.read_text())["data"]
    assert len(rows) >= 6  # beta and gamma for each order, plus eta
    for row in rows:
        assert row["p_value"] < 1e-6, row
    # identical populations: compare a batch against itself
    self_path = tmp_path / "self.json"
    assert cli_main([
        "compare", str(out_a / "summary.json"), str(out_a / "summary.json"),
        "--out", str(self_path), "--format", "json",
    ]) == 0
    for row in json.loads(self_path.read_text())["data"]:
        assert row["t_statistic"] == 0.0
        assert row["p_value"] == 1.0
    print("\nACCEPTANCE C10 PASS: shifted populations p < 1e-6, "
          "identical populations p = 1")
