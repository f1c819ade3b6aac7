"""Command-line interface.

Every computing subcommand ends by verifying its own defining identities
and refuses to exit 0 when that verification fails.  Exit codes:

    0  success / verification passed
    1  verification failed
    2  usage error or unreadable/malformed file
    3  mathematical error (singular tensor, missing group inverse,
       defective block, partition violation, ...)
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import factorizations as fz
from . import ginverses as gi
from .core import tprod
from .errors import (
    DimensionError,
    IoError,
    MathError,
    NotBlockCirculant,
    ParseError,
)
from .generate import KINDS, gen
from .io import read_tensor, write_tensor
from .report import ResidualReport

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_MATH = 3

VERIFY_KINDS = {
    # kind: (number of factor files, factor names)
    "tsvd": (3, ("U", "S", "V")),
    "tschur": (2, ("U", "T")),
    "tjordan": (2, ("P", "J")),
    "idem": (3, ("U", "E", "V")),
    "pinv": (1, ("X",)),
    "drazin": (1, ("X",)),
    "group": (1, ("X",)),
}


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol", type=float, default=None,
        help="override all residual tolerances with this value",
    )
    common.add_argument(
        "--report", default=None, metavar="PATH",
        help="write the verification report as JSON",
    )
    common.add_argument(
        "--quiet", action="store_true", help="suppress the residual summary"
    )

    parser = argparse.ArgumentParser(
        prog="tprod",
        description="t-product tensor factorizations and generalized "
                    "inverses with residual verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tprod", parents=[common], help="t-product of two tensors")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("-o", "--output", required=True)

    for name, help_text in [
        ("tsvd", "real tensor SVD"),
        ("tschur", "real t-Schur decomposition"),
        ("tjordan", "real block-bi-diagonal similarity"),
        ("idem", "factorization through a real idempotent"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("a")
        sp.add_argument("--out-prefix", required=True)

    for name, help_text in [
        ("tinv", "t-inverse"),
        ("drazin", "Drazin inverse"),
        ("group", "group inverse"),
        ("witness", "invertible von Neumann inverse"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("a")
        sp.add_argument("-o", "--output", required=True)

    sp = sub.add_parser("pinv", parents=[common], help="Moore-Penrose inverse")
    sp.add_argument("a")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--route", choices=("blocks", "svd"), default="blocks")

    sp = sub.add_parser("verify", parents=[common],
                        help="verify factors from files against an input")
    sp.add_argument("--kind", required=True, choices=sorted(VERIFY_KINDS))
    sp.add_argument("factors", nargs="+")
    sp.add_argument("--input", required=True)

    sp = sub.add_parser("gen", parents=[common], help="generate a seeded tensor")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--dims", type=int, nargs=3, required=True,
                    metavar=("M", "N", "P"))
    sp.add_argument("--kind", choices=KINDS, default="dense")
    sp.add_argument("-o", "--output", required=True)

    return parser


def _run(args) -> ResidualReport:
    if args.command == "gen":
        m, n, p = args.dims
        write_tensor(args.output, gen(args.seed, m, n, p, args.kind))
        return ResidualReport("gen")

    if args.command == "tprod":
        a = read_tensor(args.a)
        b = read_tensor(args.b)
        c = tprod(a, b, path="direct")
        write_tensor(args.output, c)
        c_fourier = tprod(a, b, path="fourier")
        report = ResidualReport("tprod").start()
        scale = (1.0 + a.max_abs) * (1.0 + b.max_abs)
        tol = args.tol if args.tol is not None else 1e-11 * scale
        report.add(
            "dual_path_agreement",
            np.abs((c - c_fourier).array).max(),
            tol,
        )
        return report.stop()

    if args.command == "verify":
        return _run_verify(args)

    a = read_tensor(args.a)

    if args.command == "tsvd":
        res = fz.t_svd(a)
        _write_factors(args.out_prefix, ("U", "S", "V"), (res.u, res.s, res.v))
        if args.tol is None:
            return res.report
        return fz.tsvd_report(a, res.u, res.s, res.v, tol=args.tol)

    if args.command == "tschur":
        res = fz.t_schur(a)
        _write_factors(args.out_prefix, ("U", "T"), (res.u, res.t))
        if args.tol is None:
            return res.report
        return fz.tschur_report(a, res.u, res.t, res.realized_partition,
                                tol=args.tol)

    if args.command == "tjordan":
        res = fz.t_jordan(a)
        _write_factors(args.out_prefix, ("P", "J"), (res.p, res.j))
        if args.tol is None:
            return res.report
        return fz.tjordan_report(a, res.p, res.j, res.realized_partition,
                                 tol=args.tol)

    if args.command == "idem":
        res = fz.idempotent_factorization(a)
        _write_factors(args.out_prefix, ("U", "E", "V"), (res.u, res.e, res.v))
        if args.tol is None:
            return res.report
        return fz.idem_report(a, res.u, res.e, res.v, tol=args.tol)

    if args.command == "tinv":
        x = gi.t_inverse(a)
        write_tensor(args.output, x)
        return gi.inverse_report(a, x, tol=args.tol)

    if args.command == "pinv":
        x = gi.t_pinv(a, route=args.route)
        write_tensor(args.output, x)
        return gi.penrose_report(a, x, tol=args.tol)

    if args.command == "drazin":
        res = gi.t_drazin(a)
        write_tensor(args.output, res.ad)
        if args.tol is None:
            return res.report
        return gi.drazin_report(a, res.ad, res.index, tol=args.tol)

    if args.command == "group":
        x = gi.t_group(a)
        write_tensor(args.output, x)
        return gi.group_report(a, x, tol=args.tol)

    if args.command == "witness":
        res = gi.unit_regular_witness(a)
        write_tensor(args.output, res.w)
        if args.tol is None:
            return res.report
        return gi.witness_report(a, res.w, tol=args.tol)

    raise _UsageError(f"unknown command {args.command!r}")


def _run_verify(args) -> ResidualReport:
    expected, names = VERIFY_KINDS[args.kind]
    if len(args.factors) != expected:
        raise _UsageError(
            f"verify --kind {args.kind} takes {expected} factor files "
            f"({', '.join(names)}), got {len(args.factors)}"
        )
    a = read_tensor(args.input)
    factors = [read_tensor(path) for path in args.factors]
    tol = args.tol
    if args.kind == "tsvd":
        return fz.tsvd_report(a, *factors, tol=tol)
    if args.kind == "tschur":
        return fz.tschur_report(a, *factors, tol=tol)
    if args.kind == "tjordan":
        return fz.tjordan_report(a, *factors, tol=tol)
    if args.kind == "idem":
        return fz.idem_report(a, *factors, tol=tol)
    if args.kind == "pinv":
        return gi.penrose_report(a, factors[0], tol=tol)
    if args.kind == "drazin":
        return gi.drazin_report(a, factors[0], gi.t_index(a), tol=tol)
    if args.kind == "group":
        return gi.group_report(a, factors[0], tol=tol)
    raise _UsageError(f"unknown verify kind {args.kind!r}")


def _write_factors(prefix: str, names, tensors) -> None:
    for name, tensor in zip(names, tensors):
        write_tensor(f"{prefix}_{name}.tns", tensor)


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS

    try:
        report = _run(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, IoError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MathError, NotBlockCirculant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.report:
        try:
            with open(args.report, "w", encoding="ascii") as fh:
                fh.write(report.to_json() + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if not args.quiet:
        for line in report.summary_lines():
            print(line)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main() -> None:
    sys.exit(cli_main())
