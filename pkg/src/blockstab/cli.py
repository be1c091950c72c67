"""Command-line interface.

Subcommands: certify, compare, hinf, verify, report.  Exit codes:
0 certified/verified (or plain success for analyses), 1 not certified,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .certificates import assemble_and_verify, certify
from .comparison import block_comparison
from .errors import NumericalError
from .linalg import DEFAULT_HINF_TOL, hinf_norm_resolvent
from .partition import make_partitioned
from .serialize import (
    certificate_document,
    input_digest,
    load_certificate,
    load_problem,
    report_document,
    write_json,
)

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


def _say(args, *message):
    if not args.quiet:
        print(*message)


def _merged_options(args, options):
    """File options overridden by explicit command-line flags."""
    merged = {
        "strategy": options.get("strategy", "auto"),
        "epsilon": options.get("epsilon"),
        "hinf_tol": options.get("hinf_tol", DEFAULT_HINF_TOL),
        "margin": options.get("margin", 0.0),
    }
    if args.strategy is not None:
        merged["strategy"] = args.strategy
    if args.epsilon is not None:
        merged["epsilon"] = args.epsilon
    if args.hinf_tol is not None:
        merged["hinf_tol"] = args.hinf_tol
    if args.margin is not None:
        merged["margin"] = args.margin
    return merged


def _run_certification(args, run_all):
    p, options = load_problem(args.input)
    merged = _merged_options(args, options)
    report = certify(
        p,
        merged["strategy"],
        epsilon=merged["epsilon"],
        hinf_tol=float(merged["hinf_tol"]),
        margin=float(merged["margin"]),
        run_all=run_all,
    )
    return p, merged, report


def cmd_certify(args) -> int:
    try:
        p, merged, report = _run_certification(args, run_all=False)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    doc = certificate_document(p, report.certificate, merged["strategy"])
    if args.out:
        write_json(args.out, doc)
    elif not args.quiet:
        print(json.dumps(doc, indent=2, sort_keys=True))

    if report.certified:
        _say(
            args,
            f"certified via strategy {report.strategy_used} "
            f"(margin {report.certificate.lyapunov_margin:.6g})",
        )
        return EXIT_OK
    if any(r.status == "error" for r in report.routes.values()):
        _say(args, "numerical failure during certification")
        return EXIT_NUMERICAL_FAILURE
    _say(args, "not certified (all attempted routes inconclusive)")
    return EXIT_NOT_CERTIFIED


def cmd_report(args) -> int:
    try:
        p, merged, report = _run_certification(args, run_all=True)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if args.out:
        write_json(args.out, report_document(p, report))
    if not args.quiet:
        print(f"{'route':<12} {'status':<8} {'time':>8}  reason")
        for name, route in report.routes.items():
            print(
                f"{name:<12} {route.status:<8} {route.elapsed:>7.3f}s  {route.reason}"
            )
        if report.certified:
            print(
                f"certified: yes (strategy {report.strategy_used}, "
                f"margin {report.certificate.lyapunov_margin:.6g})"
            )
        else:
            print("certified: no")
    return EXIT_OK if report.certified else EXIT_NOT_CERTIFIED


def cmd_compare(args) -> int:
    try:
        p, options = load_problem(args.input)
        tol = float(
            args.hinf_tol
            if args.hinf_tol is not None
            else options.get("hinf_tol", DEFAULT_HINF_TOL)
        )
        comp = block_comparison(p, tol=tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE

    if not args.quiet:
        for i, row in enumerate(comp.matrix):
            print("  ".join(f"{x:10.4f}" for x in row))
        for i, record in enumerate(comp.diagonal_provenance, start=1):
            if not record.get("hurwitz", True):
                print(f"note: diagonal block {i} is not Hurwitz (entry set to 0)")
    if args.out:
        write_json(
            args.out,
            {
                "kind": comp.kind,
                "matrix": [[float(x) for x in row] for row in comp.matrix],
                "diagonal_provenance": list(comp.diagonal_provenance),
                "hurwitz": comp.is_hurwitz(),
            },
        )
    return EXIT_OK


def _hinf_matrix(args) -> np.ndarray:
    if args.matrix is not None:
        try:
            return np.asarray(json.loads(args.matrix), dtype=float)
        except (json.JSONDecodeError, ValueError) as exc:
            raise ValueError(f"inline matrix is not valid: {exc}") from exc
    if args.input is None:
        raise ValueError("provide --input or an inline matrix")
    try:
        with open(args.input) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read {args.input}: {exc}") from exc
    if isinstance(doc, dict):
        if "matrix" not in doc:
            raise ValueError(f"{args.input}: no 'matrix' key")
        return np.asarray(doc["matrix"], dtype=float)
    return np.asarray(doc, dtype=float)


def cmd_hinf(args) -> int:
    try:
        matrix = _hinf_matrix(args)
        tol = float(args.hinf_tol) if args.hinf_tol is not None else DEFAULT_HINF_TOL
        result = hinf_norm_resolvent(matrix, tol=tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE

    doc = {
        "norm": None if not result.is_finite else result.norm,
        "finite": result.is_finite,
        "inverse_norm": result.inverse_norm,
        "peak_frequency": result.peak_frequency,
        "iterations": result.iterations,
    }
    if not args.quiet:
        if result.is_finite:
            print(
                f"norm {result.norm:.6g}  inverse {result.inverse_norm:.6g}  "
                f"peak {result.peak_frequency:.6g} rad/s"
            )
        else:
            print("norm infinite (matrix is not Hurwitz); inverse 0")
    if args.out:
        write_json(args.out, doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        p, _ = load_problem(args.input)
        cert = load_certificate(args.certificate)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    digest = input_digest(p.matrix, p.partition.sizes)
    if cert.get("input_digest") != digest:
        print(
            "error: certificate digest does not match this input "
            "(certificate was issued for a different system)",
            file=sys.stderr,
        )
        return EXIT_INPUT_ERROR
    blocks = cert.get("blocks")
    if not blocks:
        print("error: certificate carries no solution blocks", file=sys.stderr)
        return EXIT_INPUT_ERROR

    margin = float(args.margin) if args.margin is not None else 0.0
    try:
        verified = assemble_and_verify(
            p, [np.asarray(b, dtype=float) for b in blocks], margin=margin
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if verified is None:
        _say(args, "certificate FAILED re-verification")
        return EXIT_NOT_CERTIFIED
    _say(args, f"certificate verified (margin {verified.lyapunov_margin:.6g})")
    return EXIT_OK


def _add_common_flags(sub, *, strategy=False, certificate=False, inline=False):
    sub.add_argument("--input", help="problem file (JSON)")
    if inline:
        sub.add_argument(
            "matrix",
            nargs="?",
            default=None,
            help="inline JSON matrix, e.g. '[[-2]]'",
        )
    if strategy:
        sub.add_argument(
            "--strategy",
            choices=["auto", "a", "b", "c", "prop4"],
            default=None,
            help="certification route (default: auto or the problem file's choice)",
        )
        sub.add_argument("--epsilon", type=float, default=None)
    if certificate:
        sub.add_argument("--certificate", required=True, help="certificate file")
    sub.add_argument("--hinf-tol", type=float, default=None, dest="hinf_tol")
    sub.add_argument("--margin", type=float, default=None)
    sub.add_argument("--out", default=None, help="write the result document here")
    sub.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockstab",
        description=(
            "Certify asymptotic stability of block-partitioned linear systems "
            "through block-diagonal Lyapunov solutions."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    certify_p = sub.add_parser("certify", help="run certification, write a certificate")
    _add_common_flags(certify_p, strategy=True)
    certify_p.set_defaults(func=cmd_certify)

    report_p = sub.add_parser("report", help="run every route and print the outcomes")
    _add_common_flags(report_p, strategy=True)
    report_p.set_defaults(func=cmd_report)

    compare_p = sub.add_parser("compare", help="print the block comparison matrix")
    _add_common_flags(compare_p)
    compare_p.set_defaults(func=cmd_compare)

    hinf_p = sub.add_parser("hinf", help="H-infinity norm of a resolvent")
    _add_common_flags(hinf_p, inline=True)
    hinf_p.set_defaults(func=cmd_hinf)

    verify_p = sub.add_parser("verify", help="re-verify a stored certificate")
    _add_common_flags(verify_p, certificate=True)
    verify_p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "input", None) is None and getattr(args, "matrix", None) is None:
        print("error: --input is required", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
