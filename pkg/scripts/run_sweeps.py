#!/usr/bin/env python
"""Parameter sweeps on a synthetic corpus: class-weight wi, consistency
threshold gamma_min and feature count K.  Writes one CSV and one SVG chart
per axis under --outdir.  Needs a labeled corpus; generates one first if
--labeled is not given."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from tcm_stance.cli import main as cli


def run(step: list[str]) -> None:
    print("+", " ".join(step), file=sys.stderr)
    code = cli(step)
    if code != 0:
        sys.exit(code)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=Path, default=Path("sweep_out"))
    parser.add_argument("--labeled", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    out = args.outdir
    out.mkdir(parents=True, exist_ok=True)
    seed = str(args.seed)

    labeled = args.labeled
    if labeled is None:
        run(["synth", "--out", str(out), "--seed", seed])
        run(["prep", "--tweets", str(out / "tweets.jsonl"), "--out", str(out / "docs.jsonl")])
        run([
            "label", "--docs", str(out / "docs.jsonl"), "--users", str(out / "users.jsonl"),
            "--out", str(out / "labeled.jsonl"),
        ])
        labeled = out / "labeled.jsonl"

    for axis, values in (
        ("wi", "0.1..1.0:0.1"),
        ("gamma", "0.5..1.0:0.05"),
        ("k", "10,20,50,100,3000"),
    ):
        run([
            "sweep", "--axis", axis, "--values", values,
            "--labeled", str(labeled), "--seed", seed,
            "--out", str(out / f"sweep_{axis}.csv"), "--svg", str(out / f"sweep_{axis}.svg"),
        ])
    print(f"done; artifacts in {out}/", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
