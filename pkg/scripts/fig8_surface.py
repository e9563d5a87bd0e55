"""Scan the fidelity = 2/3 surface over (rho, sigma, Omega) and report the two regimes.

Near threshold the boundary extends to large plate angles at low frequency;
further above threshold high fidelity survives only for very small angles.
"""

import argparse
import time
import warnings
from collections import defaultdict

from lockedopo.cli import ISOSURFACE_HEADER, IsoSurfaceGrid, isosurface_rows, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", default="fig8.csv")
    parser.add_argument("--rho-max", type=float, default=0.1)
    parser.add_argument("--rho-count", type=int, default=20)
    parser.add_argument("--sigma-count", type=int, default=20)
    parser.add_argument("--omega-count", type=int, default=40)
    args = parser.parse_args()

    grid = IsoSurfaceGrid(
        rho_axis=(0.0, args.rho_max, args.rho_count),
        sigma_axis=(1.0, 2.0, args.sigma_count),
        omega_axis=(1e-3, 3.0, args.omega_count),
    )
    if args.rho_max > 0.2:
        print("note: rho above 0.2 lies outside the small-angle model")
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="waveplate angle")
        rows = isosurface_rows(grid)
    elapsed = time.perf_counter() - start
    write_csv(args.output, ISOSURFACE_HEADER, rows)
    print(f"{len(rows)} crossings in {elapsed:.2f} s -> {args.output}")

    cells = defaultdict(list)
    for rho, sigma, omega, direction in rows:
        cells[sigma].append((rho, omega, direction))
    for sigma in sorted(cells):
        rhos = sorted({c[0] for c in cells[sigma]})
        low = min(c[1] for c in cells[sigma])
        print(f"sigma={sigma:.3f}: crossings for rho in [{rhos[0]:.4f}, {rhos[-1]:.4f}], "
              f"lowest crossing Omega={low:.3f}")


if __name__ == "__main__":
    main()
