#!/usr/bin/env python3
"""Probe the two-phase product functional for a finite admissible constant.

No ground truth exists for this one; the script archives the evidence as
CSV (one row per radius) and prints the largest admissible constant seen.
"""

import argparse
import csv
from pathlib import Path

import carnotlab as cl
from carnotlab.functionals import conjecture_probe
from carnotlab.scans import linear_grid


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--polys", default="paper-f,paper-fmia", help="comma separated presets"
    )
    parser.add_argument("--rmin", type=float, default=0.02)
    parser.add_argument("--rmax", type=float, default=1.0)
    parser.add_argument("--points", type=int, default=25)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    spec = cl.heisenberg(1)
    radii = [float(r) for r in linear_grid(args.rmin, args.rmax, args.points)]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(exist_ok=True)

    for name in args.polys.split(","):
        poly = cl.resolve_poly(name, spec)
        result = conjecture_probe(poly, radii)
        path = out_dir / f"probe_{name.replace('*', '').replace(' ', '')}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(
                ["r", "factor_plus", "factor_minus", "product", "admissible_c"]
            )
            for row in result.rows:
                writer.writerow(
                    [
                        format(row.r, ".12g"),
                        format(row.factor_plus, ".12g"),
                        format(row.factor_minus, ".12g"),
                        format(row.product, ".12g"),
                        format(row.admissible_c, ".12g"),
                    ]
                )
        status = "finite" if result.is_finite else "nonfinite"
        print(
            f"{name}: base={result.base:.6g} C={result.c_value:.10g} "
            f"({status}) -> {path}"
        )


if __name__ == "__main__":
    main()
