#!/usr/bin/env python3
"""Fetch the public-domain novel used by the large-scale acceptance checks.

Downloads "The Hermit of Far End" by Margaret Pedler from Project Gutenberg
(via the Gutendex catalog) and stores the raw text under tests/data/.  The
acceptance tests skip the novel-based checks when this file is absent, so
run this once in an environment with network access:

    python scripts/fetch_novel.py

The raw file keeps the Gutenberg header/footer; the tests strip it through
the normal preprocessing path.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.request
from pathlib import Path

CATALOG_URL = "https://gutendex.com/books?search=hermit%20of%20far%20end"
DEFAULT_OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "hermit_of_far_end.txt"


def fetch(out_path: Path, timeout: float = 30.0) -> None:
    with urllib.request.urlopen(CATALOG_URL, timeout=timeout) as response:
        catalog = json.loads(response.read().decode("utf-8"))
    book = next(
        (
            b
            for b in catalog.get("results", [])
            if "hermit of far end" in b.get("title", "").lower()
        ),
        None,
    )
    if book is None:
        raise RuntimeError("novel not found in the Gutendex catalog")
    formats = book.get("formats", {})
    text_url = next(
        (url for mime, url in formats.items()
         if mime.startswith("text/plain") and not url.endswith(".zip")),
        None,
    )
    if text_url is None:
        raise RuntimeError(f"no plain-text format listed: {sorted(formats)}")
    with urllib.request.urlopen(text_url, timeout=timeout) as response:
        raw = response.read()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_bytes(raw)
    print(f"wrote {len(raw)} bytes to {out_path}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    parser.add_argument("--timeout", type=float, default=30.0)
    args = parser.parse_args(argv)
    try:
        fetch(args.out, args.timeout)
    except Exception as exc:  # noqa: BLE001 - report and signal failure
        print(f"download failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
