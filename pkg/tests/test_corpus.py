import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest
from scipy.stats import chisquare

from blockrep import (
    AnalyzedText,
    CorpusManifest,
    GenerationConfig,
    ManifestEntry,
    Provenance,
    bernoulli_sequence,
    block_stats,
    build_index,
    length_matched_sample,
    llm_generate,
    shuffle_text,
)
from blockrep.corpus import preprocess_directory
from blockrep.errors import PoolTooSmall, TransportError, TruncatedGeneration


# ------------------------------------------------------------- bernoulli

def test_bernoulli_deterministic():
    a = bernoulli_sequence(5000, 0.3, 17)
    b = bernoulli_sequence(5000, 0.3, 17)
    assert a.symbols == b.symbols
    assert a.provenance is Provenance.SYNTHETIC
    c = bernoulli_sequence(5000, 0.3, 18)
    assert c.symbols != a.symbols


def test_bernoulli_rejects_boundary_bias():
    for p in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            bernoulli_sequence(10, p, 0)
    with pytest.raises(ValueError):
        bernoulli_sequence(0, 0.5, 0)


def test_bernoulli_symbol_fraction_concentrates():
    text = bernoulli_sequence(10**6, 0.5, 42)
    ones = text.symbols.count("1")
    assert 0.498 <= ones / 10**6 <= 0.502


def test_bernoulli_unigram_chi_square_sane():
    text = bernoulli_sequence(10**6, 0.5, 7)
    ones = text.symbols.count("1")
    stat, p = chisquare([ones, 10**6 - ones])
    assert p > 0.001


def test_bernoulli_prefix_property():
    # stream outputs are positional, so extending n preserves the prefix
    short = bernoulli_sequence(100, 0.5, 5).symbols
    long = bernoulli_sequence(200, 0.5, 5).symbols
    assert long.startswith(short)


# --------------------------------------------------------------- shuffle

def test_shuffle_preserves_symbol_multiset():
    text = AnalyzedText("the quick brown fox jumps over the lazy dog")
    out = shuffle_text(text, 3)
    assert sorted(out.symbols) == sorted(text.symbols)
    assert out.symbols != text.symbols
    assert out.provenance is Provenance.SHUFFLED


def test_shuffle_deterministic():
    text = AnalyzedText("abcdefgh" * 50)
    assert shuffle_text(text, 9).symbols == shuffle_text(text, 9).symbols
    assert shuffle_text(text, 9).symbols != shuffle_text(text, 10).symbols


def test_shuffle_preserves_unigram_statistics():
    text = bernoulli_sequence(20_000, 0.4, 1)
    shuffled = shuffle_text(text, 2)
    s1 = block_stats(build_index(text), 1)
    s2 = block_stats(build_index(shuffled), 1)
    assert s1.totals[0] == s2.totals[0]
    assert s1.types[0] == s2.types[0]
    assert s1.repeats[0] == s2.repeats[0]


def test_shuffle_short_input_rejected():
    with pytest.raises(ValueError):
        shuffle_text(AnalyzedText("a"), 0)


# ------------------------------------------------------ length matching

def _manifest(label, lengths):
    return CorpusManifest(
        label=label,
        entries=[
            ManifestEntry(f"{label}-{i}", f"{label}-{i}.txt", Provenance.NATURAL, n)
            for i, n in enumerate(lengths)
        ],
    )


def test_exact_length_matching_is_identity():
    pool = _manifest("pool", [120, 450, 800, 1500])
    ref = _manifest("ref", [450, 1500])
    out = length_matched_sample(pool, ref, 2, seed=0)
    assert sorted(e.length for e in out.entries) == [450, 1500]


def test_nearest_neighbor_matching():
    pool = _manifest("pool", [90, 105, 210])
    ref = _manifest("ref", [100, 200])
    out = length_matched_sample(pool, ref, 2, seed=1)
    assert sorted(e.length for e in out.entries) == [105, 210]


def test_matching_never_reuses_and_is_deterministic():
    rng = np.random.default_rng(0)
    pool = _manifest("pool", rng.integers(10_000, 600_000, 60).tolist())
    ref = _manifest("ref", rng.integers(10_000, 600_000, 30).tolist())
    a = length_matched_sample(pool, ref, 30, seed=5)
    b = length_matched_sample(pool, ref, 30, seed=5)
    assert [e.source_id for e in a.entries] == [e.source_id for e in b.entries]
    assert len({e.source_id for e in a.entries}) == 30


def test_matched_sample_mean_length_tracks_reference():
    rng = np.random.default_rng(12)
    deviations = []
    for seed in range(50):
        pool_lengths = np.exp(rng.uniform(np.log(30_000), np.log(600_000), 80))
        ref_lengths = np.exp(rng.uniform(np.log(30_000), np.log(600_000), 25))
        pool = _manifest("pool", [int(x) for x in pool_lengths])
        ref = _manifest("ref", [int(x) for x in ref_lengths])
        out = length_matched_sample(pool, ref, 25, seed=seed)
        got = np.mean([e.length for e in out.entries])
        deviations.append(abs(got - ref_lengths.mean()) / ref_lengths.mean())
    assert np.mean(deviations) < 0.10


def test_pool_too_small():
    with pytest.raises(PoolTooSmall):
        length_matched_sample(_manifest("pool", [10]), _manifest("ref", [10, 20]), 2, 0)


def test_manifest_round_trip(tmp_path):
    manifest = _manifest("trip", [11, 22, 33])
    path = tmp_path / "manifest.csv"
    manifest.save(path)
    loaded = CorpusManifest.load(path)
    assert loaded.label == "trip"
    assert loaded.entries == manifest.entries


def test_manifest_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        CorpusManifest(
            label="dup",
            entries=[
                ManifestEntry("a", "a.txt", Provenance.NATURAL, 1),
                ManifestEntry("a", "b.txt", Provenance.NATURAL, 2),
            ],
        )


# ------------------------------------------------------------ preprocess

def test_preprocess_directory(tmp_path):
    raw = tmp_path / "raw"
    raw.mkdir()
    (raw / "good.txt").write_text(
        "*** START OF THE PROJECT GUTENBERG EBOOK X ***\nSome   body\ntext\n"
        "*** END OF THE PROJECT GUTENBERG EBOOK X ***\n",
        encoding="utf-8",
    )
    (raw / "bad.txt").write_bytes(b"\xff\xfe broken")
    out = tmp_path / "clean"
    manifest, problems = preprocess_directory(raw, out, label="demo")
    assert [e.source_id for e in manifest.entries] == ["good"]
    assert (out / "good.txt").read_text(encoding="utf-8") == "Some body text"
    assert manifest.entries[0].length == len("Some body text")
    assert len(problems) == 1 and "bad.txt" in problems[0]
    assert (out / "manifest.csv").exists()


# ------------------------------------------------------- generation stub

class _StubHandler(BaseHTTPRequestHandler):
    parts: list[str] = []
    fail_from_part: int | None = None
    requests_seen: list[dict] = []
    auth_seen: list[str | None] = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).requests_seen.append(body)
        type(self).auth_seen.append(self.headers.get("Authorization"))
        part_index = sum(1 for m in body["messages"] if m["role"] == "assistant")
        if self.fail_from_part is not None and part_index + 1 >= self.fail_from_part:
            self.send_response(500)
            self.end_headers()
            return
        content = self.parts[part_index]
        payload = {"choices": [{"message": {"role": "assistant", "content": content}}]}
        data = json.dumps(payload).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.requests_seen = []
    _StubHandler.auth_seen = []
    _StubHandler.fail_from_part = None
    yield f"http://127.0.0.1:{server.server_port}/v1/chat/completions"
    server.shutdown()


def _config(endpoint, tmp_path, parts=3):
    return GenerationConfig(
        endpoint=endpoint,
        model="stub-model",
        num_parts=parts,
        target_tokens=200_000,
        max_retries=1,
        retry_backoff_s=0.01,
        timeout_s=5.0,
        archive_dir=str(tmp_path),
    )


def test_llm_generate_concatenates_and_normalizes(stub_server, tmp_path):
    _StubHandler.parts = ["Once  upon a time", "there was   a fox", "the end"]
    text = llm_generate(_config(stub_server, tmp_path), "story-1")
    assert text.symbols == "Once upon a time there was a fox the end"
    assert text.provenance is Provenance.GENERATED
    assert (tmp_path / "story-1.part01.json").exists()
    assert (tmp_path / "story-1.part03.json").exists()


def test_llm_prompt_mentions_target_and_parts(stub_server, tmp_path):
    _StubHandler.parts = ["a"] * 20
    config = _config(stub_server, tmp_path, parts=20)
    prompt = config.opening_prompt()
    assert "200000" in prompt
    assert "20 parts" in prompt
    llm_generate(config, "story-2")
    assert _StubHandler.requests_seen[0]["messages"][0]["content"] == prompt


def test_llm_transport_failure_preserves_earlier_parts(stub_server, tmp_path):
    _StubHandler.parts = ["part one text", "part two text", "never delivered"]
    _StubHandler.fail_from_part = 3
    with pytest.raises(TransportError):
        llm_generate(_config(stub_server, tmp_path), "story-3")
    assert (tmp_path / "story-3.part01.json").exists()
    assert (tmp_path / "story-3.part02.json").exists()
    assert not (tmp_path / "story-3.part03.json").exists()


def test_llm_empty_part_raises_truncated(stub_server, tmp_path):
    _StubHandler.parts = ["fine", "   ", "x"]
    with pytest.raises(TruncatedGeneration):
        llm_generate(_config(stub_server, tmp_path), "story-4")


def test_llm_missing_credentials_fails_before_any_request(tmp_path):
    config = _config("http://127.0.0.1:1/unreachable", tmp_path)
    config.api_key_env = "BLOCKREP_TEST_KEY_THAT_IS_NOT_SET"
    with pytest.raises(TransportError, match="credentials"):
        llm_generate(config, "story-5")
    assert not list(tmp_path.glob("story-5*"))


def test_llm_sends_bearer_header_when_configured(stub_server, tmp_path, monkeypatch):
    _StubHandler.parts = ["alpha", "beta", "gamma"]
    monkeypatch.setenv("BLOCKREP_TEST_KEY", "secret-token")
    config = _config(stub_server, tmp_path)
    config.api_key_env = "BLOCKREP_TEST_KEY"
    llm_generate(config, "story-6")
    assert _StubHandler.auth_seen == ["Bearer secret-token"] * 3


def test_generation_config_validation(tmp_path):
    with pytest.raises(ValueError):
        GenerationConfig(endpoint="http://x", model="m", num_parts=0)
    with pytest.raises(ValueError):
        GenerationConfig(endpoint="http://x", model="m", target_tokens=0)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"endpoint": "http://x", "model": "m", "num_parts": 2}))
    config = GenerationConfig.from_json(path)
    assert config.num_parts == 2
