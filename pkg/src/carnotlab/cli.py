"""Command line drivers producing checkable verdicts.

Every subcommand prints a short report followed by a final ``verdict:``
line.  With ``--expect VERDICT`` the process exits 0 when the verdict
matches and 1 when it does not, so shell scripts can assert results; bad
flags or invalid inputs exit 2.  Floats print with 12 significant digits.
Tabular data goes to CSV (RFC-4180 style, header row) via ``--out``.

Options resolve as: explicit flag, then the JSON object given with
``--config``, then the built-in default.  Config keys use the flag name
with underscores (``radial_order``, ``rmin``, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .fields import (
    bochner_left_terms,
    bochner_residual_right,
    caloric_residual,
    carre_du_champ,
    difference_residual,
    horizontal_gradient,
    horizontal_laplacian,
)
from .functionals import (
    acf_product,
    conjecture_probe,
    d_alpha,
    frequency,
    frequency_two_term,
    omega,
    omega_r_independence,
    orthogonality_defect,
    surface_average,
)
from .gaugering import (
    gauge_pairing_residual,
    radial_power_laplacian_residual,
    verify_gauge,
)
from .groups import resolve_group
from .heat import HeatConfig, heat_scan, lower_bound_check, simulate
from .poly import Poly
from .presets import preset_names, resolve_poly
from .quadrature import QuadratureConfig, QuadratureGrid, sphere_chart
from .scans import linear_grid, monotonicity_scan, write_csv


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _merged(args, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in args.config_data:
        return args.config_data[key]
    return default


def _float_list(value) -> list[float]:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
        return [float(p) for p in parts]
    return [float(v) for v in value]


def _group(args):
    return resolve_group(_merged(args, "group", "h1"))


def _grid(args) -> QuadratureGrid:
    config = QuadratureConfig(
        radial_order=int(_merged(args, "radial_order", 64)),
        theta_order=int(_merged(args, "theta_order", 64)),
        phi_order=int(_merged(args, "phi_order", 64)),
    )
    return QuadratureGrid(sphere_chart(_group(args)), config)


def _threads(args) -> int:
    if _merged(args, "deterministic", False):
        return 1
    return int(_merged(args, "threads", 1))


def _poly_arg(args, key: str, spec) -> Poly:
    text = _merged(args, key, None)
    if text is None:
        raise ValueError(f"missing required polynomial option --{key.replace('_', '-')}")
    return resolve_poly(text, spec)


# subcommand handlers; each prints its report and returns the verdict string


def cmd_identities(args) -> str:
    spec = _group(args)
    f = _poly_arg(args, "poly", spec)
    print(f"group: {spec.name or 'custom'}")
    print(f"polynomial: {f}")
    lap_left = horizontal_laplacian(spec, f, "left")
    lap_right = horizontal_laplacian(spec, f, "right")
    for i, g in enumerate(horizontal_gradient(spec, f, "left"), start=1):
        print(f"X{i} f: {g}")
    for i, g in enumerate(horizontal_gradient(spec, f, "right"), start=1):
        print(f"Xr{i} f: {g}")
    print(f"Lap_H f (left): {lap_left}")
    print(f"Lap_H f (right): {lap_right}")
    carre_left = carre_du_champ(spec, f, "left")
    carre_right = carre_du_champ(spec, f, "right")
    print(f"|grad_H f|^2 (left): {carre_left}")
    print(f"|grad_H f|^2 (right): {carre_right}")
    print(f"Lap_H |grad_H f|^2 (left): {horizontal_laplacian(spec, carre_left, 'left')}")
    print(f"difference residual: {difference_residual(spec, f)}")
    print(f"caloric residual: {caloric_residual(spec, f)}")
    return "harmonic" if lap_left.is_zero() else "nonharmonic"


def cmd_bochner(args) -> str:
    spec = _group(args)
    f = _poly_arg(args, "poly", spec)
    side = _merged(args, "side", "both")
    if side not in ("left", "right", "both"):
        raise ValueError(f"side must be left, right, or both, got {side!r}")
    print(f"group: {spec.name or 'custom'}")
    print(f"polynomial: {f}")
    residuals = []
    if side in ("right", "both"):
        res = bochner_residual_right(spec, f)
        print(f"right-sided residual: {res}")
        residuals.append(res)
    if side in ("left", "both"):
        terms = bochner_left_terms(spec, f)
        print(f"left lhs: {terms.lhs}")
        print(f"left hessian term: {terms.hessian_term}")
        print(f"left gradient term: {terms.gradient_term}")
        print(f"left vertical term: {terms.vertical_term}")
        print(f"left mixed term: {terms.mixed_term}")
        print(f"left-sided residual: {terms.residual}")
        residuals.append(terms.residual)
    return "zero" if all(r.is_zero() for r in residuals) else "nonzero"


def cmd_gauge_verify(args) -> str:
    spec = _group(args)
    print(f"group: {spec.name or 'custom'}")
    m, m2 = spec.m, spec.m2
    samples = [
        Poly.variable(0, m, m2),
        Poly.variable(m, m, m2),
        Poly.variable(0, m, m2) * Poly.variable(m, m, m2),
    ]
    checks = [("core gauge identities", verify_gauge(spec))]
    for s in (2, 7):
        checks.append(
            (
                f"radial power identity at s={s}",
                radial_power_laplacian_residual(spec, s).is_zero(),
            )
        )
    for p in samples:
        checks.append(
            (f"pairing identity for {p}", gauge_pairing_residual(spec, p).is_zero())
        )
    for label, ok in checks:
        print(f"{label}: {'ok' if ok else 'FAILED'}")
    return "pass" if all(ok for _, ok in checks) else "fail"


def cmd_omega(args) -> str:
    grid = _grid(args)
    alpha = float(_merged(args, "alpha", 2.0))
    radii = _float_list(_merged(args, "radii", "0.25,0.5,1,2"))
    tol = float(_merged(args, "tol", 1e-10))
    scan = omega_r_independence(alpha, radii, grid)
    for r, v in zip(scan.radii, scan.values):
        print(f"omega({_fmt(alpha)}) at r={_fmt(r)}: {_fmt(v)}")
    print(f"max relative deviation: {_fmt(scan.max_rel_deviation)}")
    return "r-independent" if scan.max_rel_deviation <= tol else "r-dependent"


def cmd_scan_d(args) -> str:
    grid = _grid(args)
    spec = grid.chart.spec
    f = _poly_arg(args, "poly", spec)
    side = _merged(args, "side", "right")
    alpha = float(_merged(args, "alpha", 2.0))
    radii = linear_grid(
        float(_merged(args, "rmin", 0.02)),
        float(_merged(args, "rmax", 2.0)),
        int(_merged(args, "points", 50)),
    )
    tol = float(_merged(args, "tol", 1e-9))
    which = _merged(args, "functional", "dirichlet")
    if which == "dirichlet":
        fn = lambda r: d_alpha(f, alpha, r, grid, side=side)
    elif which == "surface-average":
        g = carre_du_champ(spec, f, side)
        fn = lambda r: surface_average(g, r, grid)
    else:
        raise ValueError(
            f"functional must be 'dirichlet' or 'surface-average', got {which!r}"
        )
    report = monotonicity_scan(fn, radii, tol=tol, threads=_threads(args))
    out = _merged(args, "out", None)
    if out:
        report.to_csv(out)
        print(f"wrote {len(radii)} rows to {out}")
    print(f"functional: {which} ({side} gradient), alpha={_fmt(alpha)}")
    print(f"radii: {len(radii)} from {_fmt(radii[0])} to {_fmt(radii[-1])}")
    print(f"first value: {_fmt(report.values[0])}")
    print(f"last value: {_fmt(report.values[-1])}")
    print(f"strict increase fraction: {_fmt(report.strict_increase_fraction)}")
    print(f"strict decrease fraction: {_fmt(report.strict_decrease_fraction)}")
    if which == "dirichlet":
        carre_e = carre_du_champ(spec, f, side).eval_exact(
            [Fraction(0)] * (spec.m + spec.m2)
        )
        bound = omega(alpha, grid) * float(carre_e)
        bound_tol = float(_merged(args, "bound_tol", 1e-8))
        bound_ok = all(v >= bound - bound_tol for v in report.values)
        print(f"gradient lower bound: {_fmt(bound)}")
        print(f"lower bound holds at every radius: {'yes' if bound_ok else 'NO'}")
    return report.verdict


def cmd_scan_acf(args) -> str:
    grid = _grid(args)
    spec = grid.chart.spec
    f = _poly_arg(args, "poly", spec)
    side = _merged(args, "side", "right")
    alpha = float(_merged(args, "alpha", 2.0))
    radii = linear_grid(
        float(_merged(args, "rmin", 0.02)),
        float(_merged(args, "rmax", 1.0)),
        int(_merged(args, "points", 25)),
    )
    tol = float(_merged(args, "tol", 1e-9))
    fn = lambda r: acf_product(f, r, grid, alpha=alpha, side=side).product
    report = monotonicity_scan(fn, radii, tol=tol, threads=_threads(args))
    out = _merged(args, "out", None)
    if out:
        report.to_csv(out)
        print(f"wrote {len(radii)} rows to {out}")
    reference = acf_product(f, radii[-1], grid, alpha=alpha, side=side)
    print(f"split factors at r={_fmt(radii[-1])}: "
          f"plus={_fmt(reference.factor_plus)} minus={_fmt(reference.factor_minus)}")
    print(f"first product: {_fmt(report.values[0])}")
    print(f"last product: {_fmt(report.values[-1])}")
    return report.verdict


def cmd_frequency(args) -> str:
    grid = _grid(args)
    spec = grid.chart.spec
    f = _poly_arg(args, "poly", spec)
    tol = float(_merged(args, "tol", 1e-6))
    pair_text = _merged(args, "pair_with", None)
    if pair_text is None:
        radii = linear_grid(
            float(_merged(args, "rmin", 0.05)),
            float(_merged(args, "rmax", 1.0)),
            int(_merged(args, "points", 20)),
        )
        results = [frequency(f, r, grid) for r in radii]
        out = _merged(args, "out", None)
        if out:
            write_csv(
                out,
                ("r", "value", "surface_value", "rel_diff"),
                (
                    (_fmt(v.r), _fmt(v.value), _fmt(v.surface_value), _fmt(v.rel_diff))
                    for v in results
                ),
            )
            print(f"wrote {len(results)} rows to {out}")
        max_rel = max(v.rel_diff for v in results)
        print(f"N at r={_fmt(radii[0])}: {_fmt(results[0].value)}")
        print(f"N at r={_fmt(radii[-1])}: {_fmt(results[-1].value)}")
        print(f"max solid-vs-surface relative difference: {_fmt(max_rel)}")
        return "consistent" if max_rel <= tol else "inconsistent"

    p_low = f
    p_high = resolve_poly(pair_text, spec)
    two = frequency_two_term(p_low, p_high, grid)
    print(f"homogeneities: h={two.h}, k={two.k}")
    print(f"a = {_fmt(two.a)}")
    print(f"b = {_fmt(two.b)}")
    print(f"c = {_fmt(two.c)}")
    print(f"a, b, c all positive: {'yes' if min(two.a, two.b, two.c) > 0 else 'NO'}")
    total = p_low + p_high
    rel_diffs = []
    for r in _float_list(_merged(args, "radii", "0.05,0.1,0.2")):
        direct = frequency(total, r, grid)
        closed = two.value(r)
        rel = abs(direct.value - closed) / max(abs(closed), 1e-300)
        rel_diffs.append(rel)
        print(
            f"N at r={_fmt(r)}: quadrature {_fmt(direct.value)}, "
            f"closed form {_fmt(closed)}, rel diff {_fmt(rel)}"
        )
    small = [two.value(r) for r in linear_grid(0.005, 0.1, 20)]
    falling = all(b <= a for a, b in zip(small, small[1:]))
    print(f"closed-form N nonincreasing on (0, 0.1]: {'yes' if falling else 'NO'}")
    return "consistent" if max(rel_diffs) <= tol else "inconsistent"


def cmd_ortho_defect(args) -> str:
    grid = _grid(args)
    spec = grid.chart.spec
    p_low = _poly_arg(args, "ph", spec)
    p_high = _poly_arg(args, "pk", spec)
    tol = float(_merged(args, "tol", 1e-6))
    res = orthogonality_defect(p_low, p_high, grid)
    print(f"lhs (degree-gap pairing): {_fmt(res.lhs)}")
    print(f"rhs (rotation form): {_fmt(res.rhs)}")
    print(f"defect: {_fmt(res.defect)}")
    print(f"relative defect: {_fmt(res.rel_defect)}")
    return "match" if res.rel_defect <= tol else "mismatch"


def cmd_heat(args) -> str:
    spec = _group(args)
    f = _poly_arg(args, "poly", spec)
    times = _float_list(
        _merged(args, "times", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    )
    config = HeatConfig(
        n_paths=int(_merged(args, "paths", 100_000)),
        dt=float(_merged(args, "dt", 1e-3)),
        seed=int(_merged(args, "seed", 0)),
        n_blocks=int(_merged(args, "blocks", 50)),
        threads=_threads(args),
    )
    ensemble = simulate(spec, times, config)
    scan = heat_scan(ensemble, f, times, tol_sigma=float(_merged(args, "tol_sigma", 3.0)))
    for row in scan.rows:
        print(f"I at t={_fmt(row.t)}: {_fmt(row.value)} (stderr {_fmt(row.stderr)})")
    bounds = lower_bound_check(ensemble, f, times)
    print(f"gradient lower bound: {_fmt(bounds.bound)}")
    print(f"lower bound holds at every time: {'yes' if bounds.all_ok else 'NO'}")
    out = _merged(args, "out", None)
    if out:
        write_csv(
            out,
            ("t", "value", "stderr", "diff", "diff_stderr"),
            (
                (_fmt(r.t), _fmt(r.value), _fmt(r.stderr), _fmt(r.diff), _fmt(r.diff_stderr))
                for r in scan.rows
            ),
        )
        print(f"wrote {len(scan.rows)} rows to {out}")
    return scan.verdict


def cmd_probe_conjecture(args) -> str:
    grid = _grid(args)
    spec = grid.chart.spec
    f = _poly_arg(args, "poly", spec)
    radii = linear_grid(
        float(_merged(args, "rmin", 0.02)),
        float(_merged(args, "rmax", 1.0)),
        int(_merged(args, "points", 25)),
    )
    alpha = float(_merged(args, "alpha", 2.0))
    side = _merged(args, "side", "right")
    result = conjecture_probe(f, radii, grid, alpha=alpha, side=side)
    out = _merged(args, "out", None)
    if out:
        write_csv(
            out,
            ("r", "factor_plus", "factor_minus", "product", "admissible_c"),
            (
                (
                    _fmt(row.r),
                    _fmt(row.factor_plus),
                    _fmt(row.factor_minus),
                    _fmt(row.product),
                    _fmt(row.admissible_c),
                )
                for row in result.rows
            ),
        )
        print(f"wrote {len(result.rows)} rows to {out}")
    print(f"normalization base: {_fmt(result.base)}")
    print(f"smallest admissible constant: {_fmt(result.c_value)}")
    return "finite" if result.is_finite else "nonfinite"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file providing option defaults")
    parser.add_argument("--expect", help="assert this verdict (exit 1 on mismatch)")


def _add_group(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--group",
        help="builtin group name (h1, h2, free3, ...) or a JSON group file "
        "(default h1)",
    )


def _add_quadrature(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radial-order", type=int, dest="radial_order")
    parser.add_argument("--theta-order", type=int, dest="theta_order")
    parser.add_argument("--phi-order", type=int, dest="phi_order")


def _add_threads(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int)
    parser.add_argument(
        "--deterministic",
        action="store_const",
        const=True,
        help="force single-threaded evaluation",
    )


def _add_poly(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--poly",
        required=required,
        help=f"polynomial text or preset name ({', '.join(preset_names())})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carnotlab",
        description="verification toolkit for horizontal calculus, gauge-ball "
        "functionals, and heat averaging on step-2 groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="first and second order horizontal calculus")
    _add_common(p)
    _add_group(p)
    _add_poly(p)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("bochner", help="Bochner-type expansions and residuals")
    _add_common(p)
    _add_group(p)
    _add_poly(p)
    p.add_argument("--side", choices=("left", "right", "both"))
    p.set_defaults(func=cmd_bochner)

    p = sub.add_parser("gauge-verify", help="exact gauge identities for an H-type group")
    _add_common(p)
    _add_group(p)
    p.set_defaults(func=cmd_gauge_verify)

    p = sub.add_parser("omega", help="gauge constant and its r-independence")
    _add_common(p)
    _add_group(p)
    _add_quadrature(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--radii", help="comma-separated radii")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("scan-d", help="monotonicity scan of the Dirichlet functional")
    _add_common(p)
    _add_group(p)
    _add_quadrature(p)
    _add_threads(p)
    _add_poly(p)
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--bound-tol", type=float, dest="bound_tol")
    p.add_argument(
        "--functional",
        choices=("dirichlet", "surface-average"),
        help="scan the ball functional or the sphere average of the carre du champ",
    )
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_scan_d)

    p = sub.add_parser("scan-acf", help="monotonicity scan of the split product")
    _add_common(p)
    _add_group(p)
    _add_quadrature(p)
    _add_threads(p)
    _add_poly(p)
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_scan_acf)

    p = sub.add_parser("frequency", help="frequency values, or a two-term expansion")
    _add_common(p)
    _add_group(p)
    _add_quadrature(p)
    _add_poly(p)
    p.add_argument("--pair-with", dest="pair_with",
                   help="second homogeneous harmonic; switches to two-term mode")
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--radii", help="probe radii for two-term mode")
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_frequency)

    p = sub.add_parser("ortho-defect", help="degree-gap sphere pairing identity")
    _add_common(p)
    _add_group(p)
    _add_quadrature(p)
    p.add_argument("--ph", required=True, help="lower-degree homogeneous harmonic")
    p.add_argument("--pk", required=True, help="higher-degree homogeneous harmonic")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_ortho_defect)

    p = sub.add_parser("heat", help="Monte Carlo caloric averaging functional")
    _add_common(p)
    _add_group(p)
    _add_threads(p)
    _add_poly(p)
    p.add_argument("--paths", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--blocks", type=int)
    p.add_argument("--times", help="comma-separated observation times")
    p.add_argument("--tol-sigma", type=float, dest="tol_sigma")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("probe-conjecture", help="admissible constant for the split product")
    _add_common(p)
    _add_group(p)
    _add_quadrature(p)
    _add_poly(p)
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_probe_conjecture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.config_data = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {config_path}: {exc}", file=sys.stderr)
            return 2
        if not isinstance(data, dict):
            print(f"error: config {config_path} must hold a JSON object", file=sys.stderr)
            return 2
        args.config_data = data
    try:
        verdict = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"verdict: {verdict}")
    expect = getattr(args, "expect", None)
    if expect is not None and expect != verdict:
        print(f"expected verdict {expect!r}, got {verdict!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
