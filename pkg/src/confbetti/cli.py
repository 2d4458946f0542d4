"""Command-line interface.

Exit status: 0 on success, 1 when a verification or closed-form comparison
fails, 2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .betti import (
    JOBS_ENV,
    TheoremEntry,
    betti,
    betti_graded_only,
    default_jobs,
    entries_csv,
    poincare_series_coeffs,
    sphere_closed_form,
    torus_closed_form,
    verify_structure,
    verify_theorem,
)
from .complex import assemble_differential, enumerate_basis
from .errors import ConfBettiError, ConsistencyError
from .model import (
    build_model,
    dump_manifold,
    resolve_manifold,
    sphere_preset,
    theta0_model,
    theta_model,
    torus_preset,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


def _same_ring(a, b) -> bool:
    return (a.dim, a.classes, a.cup) == (b.dim, b.classes, b.cup)


def closed_form_for(mc, n: int, length: int):
    """Published closed form for this ring and n, or None when none is claimed."""
    if n >= 2 and _same_ring(mc, torus_preset()):
        return [torus_closed_form(n, i) for i in range(length)]
    if n >= 3 and mc.dim % 2 == 0 and _same_ring(mc, sphere_preset(mc.dim // 2)):
        return [sphere_closed_form(mc.dim // 2, n, i) for i in range(length)]
    return None


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_betti(args) -> int:
    mc = resolve_manifold(args.manifold)
    model = build_model(mc)
    table = betti(model, args.n, jobs=args.jobs)
    cf = closed_form_for(mc, args.n, len(table.dims))
    match = None if cf is None else table.dims == cf
    entry = TheoremEntry(args.n, table.slice_dims, table.ranks, table.dims, cf, match, table.euler)
    if args.format == "json":
        doc = {"manifold": mc.name, **asdict(entry), "notes": table.notes}
        text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    elif args.format == "csv":
        text = entries_csv([entry])
    else:
        lines = [f"manifold: {mc.name}   n = {args.n}", f"betti: {table.trimmed()}", ""]
        header = f"{'i':>3} {'dim C^i':>8} {'rank d_i':>9} {'dim H^i':>8}"
        if cf is not None:
            header += f" {'closed':>7}"
        lines.append(header)
        for i, dim in enumerate(table.dims):
            row = f"{i:>3} {table.slice_dims[i]:>8} {table.ranks[i]:>9} {dim:>8}"
            if cf is not None:
                row += f" {cf[i]:>7} {'✓' if dim == cf[i] else '✗'}"
            lines.append(row)
        lines.append(f"euler characteristic: {table.euler}")
        lines.extend(f"note: {note}" for note in table.notes)
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_MISMATCH if match is False else EXIT_OK


def cmd_verify_theorem(args) -> int:
    report = verify_theorem(args.n_max, jobs=args.jobs)
    if args.format == "json":
        text = report.to_json()
    elif args.format == "csv":
        text = report.to_csv()
    else:
        lines = []
        for e in report.entries:
            mark = "✓" if e.match else "✗"
            lines.append(f"n={e.n:>2} {mark} betti={e.betti} euler={e.euler}")
        lines.append(f"stability: {report.stability_checked} comparisons, "
                     f"{len(report.stability_failures)} failures")
        lines.append("PASS" if report.passed else "FAIL")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_verify_structure(args) -> int:
    report = verify_structure(args.n_max, phi_degree=args.phi_degree)
    if args.format == "json":
        text = report.to_json()
    elif args.format == "csv":
        text = report.to_csv()
    else:
        lines = []
        for c in report.checks:
            where = "" if c.n is None else f" [n={c.n}]"
            detail = f"  ({c.detail})" if c.detail and not c.passed else ""
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}{where}{detail}")
        lines.append("PASS" if report.passed else "FAIL")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_dump_model(args) -> int:
    mc = resolve_manifold(args.manifold)
    if args.format == "text":
        model = build_model(mc)
        lines = [f"model of {mc.name} (dim {mc.dim})"]
        for g in model.algebra.generators:
            lines.append(f"  {g.name:<12} degree {g.degree:>3}  weight {g.weight}  "
                         f"D = {model.differential.image(g.name)}")
        lines.extend(f"note: {note}" for note in model.notes)
        text = "\n".join(lines) + "\n"
    else:
        build_model(mc)  # validates beyond the ring axioms
        text = dump_manifold(mc)
    _emit(text, args.output)
    return EXIT_OK


def cmd_dump_matrix(args) -> int:
    model = build_model(resolve_manifold(args.manifold))
    dom = enumerate_basis(model, args.n, args.i)
    cod = enumerate_basis(model, args.n, args.i + 1)
    _emit(assemble_differential(model, dom, cod).dumps(), args.output)
    return EXIT_OK


def cmd_series(args) -> int:
    if args.complex:
        model = {"theta": theta_model, "theta0": theta0_model}[args.complex]()
        coeffs = betti_graded_only(model, args.i_max, jobs=args.jobs)
    else:
        degrees = [int(d) for d in args.degrees.split(",") if d.strip()] if args.degrees else []
        coeffs = poincare_series_coeffs(degrees, args.i_max)
    if args.format == "json":
        text = json.dumps({"coefficients": coeffs}) + "\n"
    elif args.format == "csv":
        text = "i,coefficient\n" + "".join(f"{i},{c}\n" for i, c in enumerate(coeffs))
    else:
        text = " ".join(str(c) for c in coeffs) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confbetti",
        description="Rational Betti numbers of unordered configuration spaces via Félix–Thomas models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json", "csv")):
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--jobs", type=int, default=default_jobs(),
                       help=f"worker processes for rank jobs (default ${JOBS_ENV} or 1)")

    manifold_help = "preset ('torus', 'sphere:d=<k>') or path to a manifold JSON file"

    p = sub.add_parser("betti", help="Betti table of Omega_n")
    p.add_argument("--manifold", default="torus", help=manifold_help)
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("verify-theorem", help="compare the torus tables with the closed form")
    p.add_argument("--n-max", type=int, default=12)
    common(p)
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("verify-structure", help="check the maps and cocycles behind the torus result")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--phi-degree", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_verify_structure)

    p = sub.add_parser("dump-model", help="print a manifold description (json) or its model (text)")
    p.add_argument("--manifold", default="torus", help=manifold_help)
    common(p, formats=("json", "text"))
    p.set_defaults(func=cmd_dump_model)

    p = sub.add_parser("dump-matrix", help="differential Omega_n^i -> Omega_n^{i+1} as coordinate text")
    p.add_argument("--manifold", default="torus", help=manifold_help)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    common(p, formats=("text",))
    p.set_defaults(func=cmd_dump_matrix)

    p = sub.add_parser("series", help="Poincaré series of a free algebra, or Betti numbers of Θ")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--degrees", help="comma-separated generator degrees, e.g. 1,1,3,2,2")
    group.add_argument("--complex", choices=("theta", "theta0"))
    p.add_argument("--i-max", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_series)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n_max", 2) < 2:
        parser.error("--n-max must be at least 2")
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ConfBettiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
