"""Write the CSV data behind every figure preset and print a one-line summary per file."""

import argparse
import csv
import time
from pathlib import Path

from lockedopo.cli import FIGURE_NAMES, run_figure


def summarize(path: Path) -> str:
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if "sx_minus_min" in rows[0]:
        best = min(rows, key=lambda r: float(r["sx_minus_min"]))
        return f"{len(rows)} rows, lowest S_x^- minimum {float(best['sx_minus_min']):.4f} at rho={best['rho']}"
    duan = [float(r["duan"]) for r in rows]
    below = sum(d < 2 for d in duan)
    return f"{len(rows)} rows, Duan sum < 2 on {below}/{len(rows)} points"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="figures")
    parser.add_argument("names", nargs="*", default=list(FIGURE_NAMES))
    args = parser.parse_args()
    for name in args.names:
        start = time.perf_counter()
        paths = run_figure(name, args.outdir)
        elapsed = time.perf_counter() - start
        for path in paths:
            print(f"{path}: {summarize(path)}")
        print(f"  {name} done in {elapsed:.2f} s")


if __name__ == "__main__":
    main()
