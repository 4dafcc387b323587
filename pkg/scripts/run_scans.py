#!/usr/bin/env python3
"""Radius scans of the averaged Dirichlet functionals for a chosen polynomial.

Writes one CSV per scan into --out-dir and prints the verdict lines.  The
right-invariant scan runs on (0.02, 2) where the functional should grow;
the left-invariant scan and the surface average run on the small window
(0.02, 0.33) where they decrease for the benchmark cubic.
"""

import argparse
from pathlib import Path

import carnotlab as cl
from carnotlab.fields import carre_du_champ
from carnotlab.functionals import d_alpha, surface_average
from carnotlab.scans import linear_grid, monotonicity_scan


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--poly", default="paper-f", help="preset name or expression")
    parser.add_argument("--points", type=int, default=50)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    spec = cl.heisenberg(1)
    poly = cl.resolve_poly(args.poly, spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(exist_ok=True)
    slug = args.poly.replace("*", "").replace(" ", "")

    jobs = [
        (
            "right",
            linear_grid(0.02, 2.0, args.points),
            lambda r: d_alpha(poly, 2.0, r, side="right"),
        ),
        (
            "left",
            linear_grid(0.02, 0.33, args.points),
            lambda r: d_alpha(poly, 2.0, r, side="left"),
        ),
    ]
    carre_left = carre_du_champ(spec, poly, side="left")
    jobs.append(
        (
            "surface-average",
            linear_grid(0.02, 0.33, args.points),
            lambda r: surface_average(carre_left, r),
        )
    )

    for name, grid, fn in jobs:
        report = monotonicity_scan(fn, grid, threads=args.threads)
        path = out_dir / f"scan_{slug}_{name}.csv"
        report.to_csv(path)
        print(f"{name}: verdict={report.verdict} -> {path}")


if __name__ == "__main__":
    main()
