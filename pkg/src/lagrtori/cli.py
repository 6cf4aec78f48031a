"""Command-line reports for the torus-fibration computations.

Subcommands
-----------
bs-count       integral-level fiber enumeration and the dimension comparison
enc-report     displaceable-or-monotone dichotomy over an interior grid
chekanov-scan  tripled-period integrality scan of the conic-pencil family
plot           SVG of the moment triangle and fiber lattices

All reports are wrapped in a versioned JSON envelope with the parameters and
the diagnostics (tolerances, quadrature settings, seed, threads) actually
used; identical inputs produce byte-identical output.  Exit codes: 0 success,
2 usage, 3 dichotomy contradiction, 4 scan failure, 5 IO error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import __version__
from .chekanov import canonical_bs_scan
from .clifford import ActionCoords, enumerate_bs_fibers, hilbert_dimension, interior_rational_grid
from .displacement import (
    DisplacementCertificate,
    Inconclusive,
    Monotone,
    displace_chekanov,
    enc_verdict,
)
from .errors import InternalContradiction, LagrtoriError
from .geometry import QuadSpec
from .serialize import rational_pair, stable_dumps
from .svgplot import render_triangle_plot

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONTRADICTION = 3
EXIT_SCAN = 4
EXIT_IO = 5


def _threads() -> int:
    raw = os.environ.get("LAGRTORI_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _envelope(command: str, params: dict, results: dict, diagnostics: dict) -> str:
    body = {
        "command": command,
        "version": __version__,
        "params": params,
        "results": results,
        "diagnostics": diagnostics,
    }
    return stable_dumps(body) + "\n"


def _emit(out_stream, text: str) -> None:
    out_stream.write(text)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_bs_count(args, out) -> int:
    fibers = enumerate_bs_fibers(args.level, closed=args.closed)
    comparison = hilbert_dimension(args.level, closed=args.closed)
    if args.format == "csv":
        lines = ["r0_num,r0_den,r1_num,r1_den"]
        for f in fibers.fibers:
            lines.append(f"{f.r0.numerator},{f.r0.denominator},"
                         f"{f.r1.numerator},{f.r1.denominator}")
        _emit(out, "\n".join(lines) + "\n")
        return EXIT_OK
    results = {
        "count": fibers.count,
        "fibers": [[rational_pair(f.r0), rational_pair(f.r1)] for f in fibers.fibers],
        "hilbert_dimension": comparison.dimension,
        "match": comparison.match,
    }
    _emit(out, _envelope(
        "bs-count",
        {"level": args.level, "closed": args.closed, "format": args.format},
        results,
        {"seed": args.seed, "threads": _threads(),
         "tolerances": {"arithmetic": "exact rational"}},
    ))
    return EXIT_OK


def _cmd_enc_report(args, out) -> int:
    grid = interior_rational_grid(args.grid)
    rows = []
    monotone_points = []
    displaceable = 0
    for r0, r1 in grid:
        verdict = enc_verdict(ActionCoords(r0, r1))
        if isinstance(verdict, Monotone):
            monotone_points.append([rational_pair(r0), rational_pair(r1)])
            rows.append({
                "base": [rational_pair(r0), rational_pair(r1)],
                "verdict": "monotone",
                "bs_defect": verdict.witness.bs_defect,
                "universal_class": list(verdict.witness.universal_class),
            })
        else:
            displaceable += 1
            cert = verdict.certificate
            rows.append({
                "base": [rational_pair(r0), rational_pair(r1)],
                "verdict": "displaceable",
                "swap": cert.detail["swap"],
                "separation": cert.separation,
            })
    results = {
        "grid": args.grid,
        "denominator": args.grid + 2,
        "points": len(grid),
        "monotone_points": monotone_points,
        "monotone_count": len(monotone_points),
        "displaceable_count": displaceable,
        "rows": rows,
    }
    _emit(out, _envelope(
        "enc-report",
        {"grid": args.grid},
        results,
        {"seed": args.seed, "threads": _threads(),
         "tolerances": {"arithmetic": "exact rational", "bs_tol": 1e-9}},
    ))
    return EXIT_OK


def _float_range(lo: float, hi: float, step: float) -> list[float]:
    vals = []
    k = 0
    while True:
        v = round(lo + k * step, 12)
        if v > hi + 1e-12:
            break
        vals.append(v)
        k += 1
    return vals


def _cmd_chekanov_scan(args, out, err) -> int:
    mu = complex(args.mu[0], args.mu[1])
    a_grid = _float_range(args.a_min, args.a_max, args.a_step)
    delta_grid = _float_range(-1.0 + args.delta_step, 1.0 - args.delta_step,
                              args.delta_step)
    quad = QuadSpec(nodes_per_axis=args.quad_nodes)
    threads = _threads()
    report = canonical_bs_scan(mu, a_grid, delta_grid, quad,
                               seed=args.seed, workers=threads)

    issued = inconclusive = 0
    cert_rows = []
    for a in a_grid:
        for delta in delta_grid:
            res = displace_chekanov(
                _params_for(mu, a, delta), samples=args.cert_samples)
            if isinstance(res, DisplacementCertificate):
                issued += 1
                cert_rows.append({"a": a, "delta": delta,
                                  "separation": res.separation})
            else:
                inconclusive += 1
                cert_rows.append({"a": a, "delta": delta,
                                  "separation": res.separation,
                                  "inconclusive": True})

    csv_text = report.to_csv()
    if args.csv_out:
        try:
            with open(args.csv_out, "w") as fh:
                fh.write(csv_text)
        except OSError as exc:
            print(f"error: cannot write CSV: {exc}", file=err)
            return EXIT_IO
    if args.format == "csv":
        _emit(out, csv_text)
        return EXIT_OK
    results = {
        "summary": {
            "min_defect": report.min_defect,
            "argmin": list(report.argmin),
            "certificates": {
                "issued": issued,
                "inconclusive": inconclusive,
                "total": issued + inconclusive,
            },
        },
        "scan": report.to_json(),
        "certificate_rows": cert_rows,
    }
    _emit(out, _envelope(
        "chekanov-scan",
        {
            "mu": [mu.real, mu.imag],
            "a_min": args.a_min, "a_max": args.a_max, "a_step": args.a_step,
            "delta_step": args.delta_step, "cert_samples": args.cert_samples,
            "format": args.format,
        },
        results,
        {"seed": args.seed, "threads": threads,
         "quadrature": {"nodes_per_axis": quad.nodes_per_axis,
                        "refinement_levels": quad.refinement_levels,
                        "max_disagreement": quad.max_disagreement},
         "tolerances": {"certificate_threshold": 1e-3}},
    ))
    return EXIT_OK


def _params_for(mu: complex, a: float, delta: float):
    from .chekanov import ChekanovParams

    return ChekanovParams(a, mu, delta)


def _cmd_plot(args, out, err) -> int:
    svg = render_triangle_plot(args.level)
    if args.out is None:
        _emit(out, svg)
        return EXIT_OK
    try:
        with open(args.out, "w") as fh:
            fh.write(svg)
    except OSError as exc:
        print(f"error: cannot write SVG: {exc}", file=err)
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _complex_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected RE,IM")
    return (float(parts[0]), float(parts[1]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagrtori",
        description="reports on lagrangian torus fibrations of the projective plane",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bs = sub.add_parser("bs-count", help="integral-level fiber counts")
    p_bs.add_argument("--level", type=_positive_int, required=True)
    p_bs.add_argument("--closed", action="store_true",
                      help="count the closed-triangle lattice instead of the interior")
    p_bs.add_argument("--format", choices=("json", "csv"), default="json")
    p_bs.add_argument("--seed", type=int, default=0)

    p_enc = sub.add_parser("enc-report", help="displaceable-or-monotone dichotomy")
    p_enc.add_argument("--grid", type=int, required=True,
                       help="interior grid size N (N >= 3)")
    p_enc.add_argument("--seed", type=int, default=0)

    p_scan = sub.add_parser("chekanov-scan",
                            help="integrality scan of the conic-pencil family")
    p_scan.add_argument("--mu", type=_complex_pair, required=True,
                        metavar="RE,IM")
    p_scan.add_argument("--a-min", type=float, required=True)
    p_scan.add_argument("--a-max", type=float, required=True)
    p_scan.add_argument("--a-step", type=float, required=True)
    p_scan.add_argument("--delta-step", type=float, required=True)
    p_scan.add_argument("--quad-nodes", type=int, default=32)
    p_scan.add_argument("--cert-samples", type=int, default=48,
                        help="per-axis sample count for displacement certificates")
    p_scan.add_argument("--csv-out", default=None)
    p_scan.add_argument("--format", choices=("json", "csv"), default="json")
    p_scan.add_argument("--seed", type=int, default=0)

    p_plot = sub.add_parser("plot", help="SVG of the triangle and fiber lattices")
    p_plot.add_argument("--level", type=_positive_int, required=True)
    p_plot.add_argument("--out", default=None, help="output path (default stdout)")
    p_plot.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "enc-report" and args.grid < 3:
        parser.error("--grid must be at least 3")
    if args.command == "chekanov-scan":
        mu_abs = abs(complex(args.mu[0], args.mu[1]))
        if not 0 < args.a_min <= args.a_max:
            parser.error("need 0 < --a-min <= --a-max")
        if args.a_max >= mu_abs:
            parser.error(f"--a-max must stay below |mu| = {mu_abs!r} "
                         "(the a < |mu| regime)")
        if not 0 < args.delta_step < 1:
            parser.error("--delta-step must lie in (0, 1)")

    try:
        if args.command == "bs-count":
            return _cmd_bs_count(args, out)
        if args.command == "enc-report":
            return _cmd_enc_report(args, out)
        if args.command == "chekanov-scan":
            return _cmd_chekanov_scan(args, out, err)
        if args.command == "plot":
            return _cmd_plot(args, out, err)
    except InternalContradiction as exc:
        print(f"error: dichotomy contradiction: {exc}", file=err)
        return EXIT_CONTRADICTION
    except LagrtoriError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_SCAN
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
