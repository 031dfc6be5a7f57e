"""Regenerate every CSV table the package can produce into one directory.

    python3 scripts/make_datasets.py [--out data] [--budget 100000] [--fast]

``--fast`` shrinks the optimizer budget and the min-entropy curve so the whole
run takes well under a minute.
"""

import argparse
import time
from pathlib import Path

from seqrac import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--fast", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    budget = 2_000 if args.fast else args.budget
    jobs = {
        "sweep.csv": ["sweep"],
        "tradeoff.csv": ["tradeoff", "--budget", str(budget)],
        "frontier.csv": ["frontier", "--budget", str(budget), "--seed", "0,1,2"],
        "chain.csv": ["chain", "20"],
        "randomness.csv": ["randomness"] + (["--budget", "1", "--curve-points", "31"] if args.fast else []),
    }
    for name, argv in jobs.items():
        start = time.perf_counter()
        cfg = cli.parse_config(argv + ["--out", str(args.out / name)])
        text = cli.run(cfg)
        (args.out / name).write_text(text)
        print(f"{name:16s} {len(text.splitlines()):5d} lines  {time.perf_counter() - start:6.1f}s")


if __name__ == "__main__":
    main()
