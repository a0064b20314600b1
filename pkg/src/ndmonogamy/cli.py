"""Command-line surface: bounds table, region export, invariant suite.

Exit codes: 0 success, 1 invariant failure, 2 usage error, 3 I/O error.
All numeric output uses '.' decimals and fixed significant-digit
formatting, so identical seeds and flags give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import classical, nodisturbance, quantum, region, verify

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_IO = 3

TABLE_DIGITS = 12


def _bounds_rows() -> list[dict]:
    expressions = [
        ("kcbs", classical.kcbs_expression()),
        ("chsh", classical.chsh_expression()),
        *[(f"c1[{i}]", classical.c1_expression(i)) for i in nodisturbance.PIVOTS],
        *[(f"c2[{i}]", classical.c2_expression(i)) for i in nodisturbance.PIVOTS],
        ("kcbs+chsh", nodisturbance.monogamy_expression()),
    ]
    rows = []
    for name, expr in expressions:
        classical_min = classical.classical_bound(expr).minimum
        nd_min = nodisturbance.nd_optimum(expr).value
        w, _ = quantum.eigensystem(quantum.expression_operator(expr))
        rows.append(
            {
                "expression": name,
                "classical_min": classical_min,
                "nd_min": nd_min,
                "quantum_min": float(w[0]),
            }
        )
    return rows


def _check_bounds_rows(rows: list[dict]) -> list[str]:
    """Internal consistency of the printed table against known values."""
    expected = {
        "kcbs": (-3.0, -5.0, 5.0 - 4.0 * math.sqrt(5.0)),
        "chsh": (-2.0, -4.0, None),
        "kcbs+chsh": (-5.0, -5.0, -5.0),
    }
    for i in nodisturbance.PIVOTS:
        expected[f"c1[{i}]"] = (-3.0, -3.0, None)
        expected[f"c2[{i}]"] = (-2.0, -2.0, None)
    problems = []
    for row in rows:
        classical_ref, nd_ref, quantum_ref = expected[row["expression"]]
        if row["classical_min"] != classical_ref:
            problems.append(f"{row['expression']}: classical {row['classical_min']}")
        if abs(row["nd_min"] - nd_ref) > 1e-6:
            problems.append(f"{row['expression']}: nd {row['nd_min']}")
        if quantum_ref is not None and abs(row["quantum_min"] - quantum_ref) > 1e-9:
            problems.append(f"{row['expression']}: quantum {row['quantum_min']}")
    return problems


def _format_bounds_text(rows: list[dict]) -> str:
    header = f"{'expression':<12} {'classical':>18} {'no-disturbance':>18} {'quantum':>18}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row['expression']:<12} "
            f"{row['classical_min']:>18.{TABLE_DIGITS}g} "
            f"{row['nd_min']:>18.{TABLE_DIGITS}g} "
            f"{row['quantum_min']:>18.{TABLE_DIGITS}g}"
        )
    return "\n".join(lines)


def cmd_bounds(args: argparse.Namespace) -> int:
    rows = _bounds_rows()
    text = (
        json.dumps(rows, indent=2)
        if args.format == "json"
        else _format_bounds_text(rows)
    )
    if args.out:
        try:
            Path(args.out).write_text(text + "\n")
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(text)
    problems = _check_bounds_rows(rows)
    if problems:
        for p in problems:
            print(f"bound check failed: {p}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_region(args: argparse.Namespace) -> int:
    if args.samples < 2:
        print("region export needs --samples >= 2", file=sys.stderr)
        return EXIT_USAGE
    points = region.sample_boundary(args.samples)
    touch = region.touching_point()
    nd_line = [
        (chsh, -5.0 - chsh) for chsh in np.linspace(-4.0, 1.0, args.samples)
    ]
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "boundary.csv").write_text(
            "\n".join(region.boundary_csv_rows(points)) + "\n"
        )
        (out_dir / "touching_point.csv").write_text(
            "\n".join(region.boundary_csv_rows([touch])) + "\n"
        )
        nd_rows = ["chsh,kcbs"] + [
            f"{c:.17g},{k:.17g}" for c, k in nd_line
        ]
        (out_dir / "nd_line.csv").write_text("\n".join(nd_rows) + "\n")
    except OSError as exc:
        print(f"cannot write to {out_dir}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(
        f"wrote {len(points)} boundary points, {len(nd_line)} line samples and "
        f"the touching point ({touch.chsh:.6f}, {touch.kcbs:.6f}) to {out_dir}"
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    chsh_matrix = None
    if args.perturb_chsh:
        chsh_matrix = quantum.chsh_operator()
        chsh_matrix[0, 1] += args.perturb_chsh  # cross-block entry, test hook
        chsh_matrix[1, 0] += args.perturb_chsh
    results = verify.verify_all(args.samples, args.seed, chsh_matrix, slack=args.tol)
    summary = verify.summary_json(results, args.samples, args.seed)
    if args.format == "json":
        print(summary)
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"[{status}] {r.name}: {r.detail}")
    if args.out:
        try:
            Path(args.out).write_text(summary + "\n")
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    failures = [r.name for r in results if not r.passed]
    if failures:
        print(f"first failing invariant: {failures[0]}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndmonogamy",
        description=(
            "Classical, no-disturbance and quantum bounds for the "
            "pentagon/Bell monogamy scenario, with reproduction data export."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="print the bounds table")
    p_bounds.add_argument("--format", choices=("text", "json"), default="text")
    p_bounds.add_argument("--out", default=None, help="write the table to a file")
    p_bounds.set_defaults(func=cmd_bounds)

    p_region = sub.add_parser("region", help="export boundary and line CSVs")
    p_region.add_argument(
        "--samples", type=int, default=100_000, help="boundary points per branch"
    )
    p_region.add_argument("--out", default="region_out", help="output directory")
    p_region.set_defaults(func=cmd_region)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument("--samples", type=int, default=100_000)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--tol", type=float, default=1e-9)
    p_verify.add_argument("--format", choices=("text", "json"), default="text")
    p_verify.add_argument("--out", default=None, help="write the JSON summary to a file")
    p_verify.add_argument(
        "--perturb-chsh",
        type=float,
        default=0.0,
        help="fault-injection test hook: add this to a cross-block entry",
    )
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        print("--samples must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "tol", 1.0) <= 0:
        print("--tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
