"""Corpus ingestion, synthetic baselines, and remote text generation.

Synthetic inputs (coin-flip sequences at any bias, uniform shuffles of an
existing text) regenerate byte-identically from a seed on any platform via
the fixed splitmix64 stream in `rng`.  Manifests are small delimited files
mapping source ids to files, provenance and normalized lengths, and the
length-matched sampler draws a comparison corpus whose length distribution
tracks a reference set.

The chat-completion client is deliberately minimal: sequential parts in one
conversation, bounded retries, raw responses archived next to the output so
generated corpora stay auditable.  It is optional at runtime and exercised
against a stub server in the tests; nothing else in the package needs a
network.
"""

from __future__ import annotations

import csv
import json
import math
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backend
from .counting import AnalyzedText, NormalizationOptions, Provenance, normalize_text
from .errors import PoolTooSmall, TransportError, TruncatedGeneration
from .rng import MASK64, SplitMix64, splitmix_stream, uniform_doubles

DEFAULT_PROMPT_TEMPLATE = (
    "You are a genius storyteller. I want you to generate a story longer than "
    "{target_tokens} tokens in {num_parts} parts. Please tell the story part by part."
)
CONTINUE_TEMPLATE = "Please continue the story with part {part} of {num_parts}."


@dataclass(frozen=True)
class ManifestEntry:
    source_id: str
    path: str
    provenance: Provenance
    length: int


@dataclass
class CorpusManifest:
    label: str
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        ids = [e.source_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate source ids in manifest {self.label!r}")

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# blockrep-manifest v1 label={self.label}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["source_id", "path", "provenance", "length"])
            for e in self.entries:
                writer.writerow([e.source_id, e.path, e.provenance.value, e.length])

    @classmethod
    def load(cls, path: str | Path) -> "CorpusManifest":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            label = "dataset"
            if header.startswith("#") and "label=" in header:
                label = header.split("label=", 1)[1].strip()
            reader = csv.DictReader(fh)
            entries = [
                ManifestEntry(
                    source_id=row["source_id"],
                    path=row["path"],
                    provenance=Provenance(row["provenance"]),
                    length=int(row["length"]),
                )
                for row in reader
            ]
        return cls(label=label, entries=entries)


def bernoulli_sequence(n: int, p: float, seed: int) -> AnalyzedText:
    """Binary '0'/'1' sequence with P(symbol = '1') = p, seeded.

    Symbol k comes from output k of the splitmix64 stream mapped to [0, 1),
    so sequences regenerate identically everywhere and extending n keeps a
    common prefix.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    u = uniform_doubles(splitmix_stream(seed, n))
    symbols = np.where(u < p, np.uint8(ord("1")), np.uint8(ord("0"))).tobytes().decode("ascii")
    return AnalyzedText(
        symbols=symbols,
        source_id=f"bernoulli-n{n}-p{p:g}-s{seed}",
        provenance=Provenance.SYNTHETIC,
    )


def shuffle_text(text: AnalyzedText, seed: int) -> AnalyzedText:
    """Uniform random permutation of the symbols (Fisher-Yates, seeded)."""
    if text.n < 2:
        raise ValueError("shuffling needs at least 2 symbols")
    shuffled = backend.shuffle_codes(text.scalar_values(), np.uint64(seed & MASK64))
    symbols = shuffled.astype("<u4").tobytes().decode("utf-32-le")
    return AnalyzedText(
        symbols=symbols,
        source_id=f"{text.source_id}-shuffled-s{seed}",
        provenance=Provenance.SHUFFLED,
    )


def length_matched_sample(
    pool: CorpusManifest, reference: CorpusManifest, count: int, seed: int
) -> CorpusManifest:
    """Greedy nearest-length draw from `pool` matching `reference` lengths.

    Reference lengths are visited in a seeded shuffled order; each picks the
    unused pool text minimizing |log n_pool - log n_ref| (relative error is
    the natural scale when lengths span orders of magnitude).  No pool text
    is reused.
    """
    if len(pool.entries) < count:
        raise PoolTooSmall(f"pool has {len(pool.entries)} texts, need {count}")
    if len(reference.entries) < count:
        raise ValueError(f"reference has {len(reference.entries)} texts, need {count}")
    order = list(range(len(reference.entries)))
    SplitMix64(seed).shuffle(order)
    pool_logs = [math.log(e.length) for e in pool.entries]
    used = [False] * len(pool.entries)
    chosen: list[ManifestEntry] = []
    for ref_idx in order[:count]:
        target = math.log(reference.entries[ref_idx].length)
        best = -1
        best_gap = math.inf
        for i, lg in enumerate(pool_logs):
            if used[i]:
                continue
            gap = abs(lg - target)
            if gap < best_gap:
                best_gap = gap
                best = i
        used[best] = True
        chosen.append(pool.entries[best])
    return CorpusManifest(label=f"{pool.label}-matched", entries=chosen)


@dataclass
class GenerationConfig:
    """Settings for the chat-completion generation harness.

    Credentials are only ever referenced by environment variable name and
    never stored or logged.
    """

    endpoint: str
    model: str
    num_parts: int = 20
    target_tokens: int = 200_000
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    timeout_s: float = 120.0
    max_retries: int = 3
    retry_backoff_s: float = 2.0
    api_key_env: str | None = None
    archive_dir: str = "."

    def __post_init__(self):
        if self.num_parts < 1:
            raise ValueError("num_parts must be >= 1")
        if self.target_tokens < 1:
            raise ValueError("target_tokens must be >= 1")

    def opening_prompt(self) -> str:
        return self.prompt_template.format(
            target_tokens=self.target_tokens, num_parts=self.num_parts
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "GenerationConfig":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))


def _post_chat(config: GenerationConfig, messages: list[dict], api_key: str | None) -> dict:
    body = json.dumps({"model": config.model, "messages": messages}).encode("utf-8")
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    request = urllib.request.Request(config.endpoint, data=body, headers=headers)
    last_error: Exception | None = None
    for attempt in range(config.max_retries + 1):
        try:
            with urllib.request.urlopen(request, timeout=config.timeout_s) as response:
                return json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            last_error = exc
            if attempt < config.max_retries:
                time.sleep(config.retry_backoff_s * (attempt + 1))
    raise TransportError(f"endpoint failed after {config.max_retries + 1} attempts: {last_error}")


def llm_generate(config: GenerationConfig, seed_label: str) -> AnalyzedText:
    """Generate one long text as `num_parts` turns of a single conversation.

    Each raw response is archived as JSON under the configured directory
    before the next request, so parts already received survive a transport
    failure.  Part texts are joined with single newlines and normalized.

    Raises TransportError when retries are exhausted and TruncatedGeneration
    when a part comes back empty.
    """
    import os

    api_key = None
    if config.api_key_env:
        api_key = os.environ.get(config.api_key_env)
        if not api_key:
            raise TransportError(
                f"credentials variable {config.api_key_env} is not set"
            )
    archive = Path(config.archive_dir)
    archive.mkdir(parents=True, exist_ok=True)
    messages = [{"role": "user", "content": config.opening_prompt()}]
    parts: list[str] = []
    for part in range(1, config.num_parts + 1):
        payload = _post_chat(config, messages, api_key)
        raw_path = archive / f"{seed_label}.part{part:02d}.json"
        with open(raw_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)
        try:
            content = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise TruncatedGeneration(f"part {part}: malformed response") from None
        if not content or not content.strip():
            raise TruncatedGeneration(f"part {part}: empty completion")
        parts.append(content)
        messages.append({"role": "assistant", "content": content})
        if part < config.num_parts:
            messages.append(
                {
                    "role": "user",
                    "content": CONTINUE_TEMPLATE.format(part=part + 1, num_parts=config.num_parts),
                }
            )
    return normalize_text(
        "\n".join(parts), source_id=seed_label, provenance=Provenance.GENERATED
    )


def preprocess_directory(
    raw_dir: str | Path,
    out_dir: str | Path,
    options: NormalizationOptions | None = None,
    label: str = "dataset",
) -> tuple[CorpusManifest, list[str]]:
    """Normalize every .txt file of a directory and write a manifest.

    Returns the manifest of successes plus warning strings for files that
    failed (bad encoding, empty after cleanup); a failed file never aborts
    the rest.
    """
    raw_dir = Path(raw_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    opts = options or NormalizationOptions(strip_boilerplate=True)
    entries: list[ManifestEntry] = []
    problems: list[str] = []
    for path in sorted(raw_dir.glob("*.txt")):
        try:
            text = normalize_text(
                path.read_bytes(), opts, source_id=path.stem, provenance=Provenance.NATURAL
            )
        except Exception as exc:  # noqa: BLE001 - per-file isolation is the contract
            problems.append(f"{path.name}: {exc}")
            continue
        out_path = out_dir / f"{path.stem}.txt"
        out_path.write_text(text.symbols, encoding="utf-8", newline="\n")
        entries.append(
            ManifestEntry(
                source_id=path.stem,
                path=str(out_path),
                provenance=Provenance.NATURAL,
                length=text.n,
            )
        )
    manifest = CorpusManifest(label=label, entries=entries)
    manifest.save(out_dir / "manifest.csv")
    return manifest, problems
