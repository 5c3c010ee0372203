"""Command-line driver for the experiment harness.

Subcommands: ``decompose`` (single-task sweep), ``meta`` (meta sweeps),
``asymptotics``, ``audit``, ``oracle-check``, ``bounds``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(a covariance lost positive definiteness or a downdate degenerated),
4 audit failure (an identity residual beyond tolerance), so CI can gate
on the identities.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import (
    ConfigError,
    DegenerateDowndate,
    InfosensError,
    InsufficientGrid,
    NotPositiveDefinite,
)
from .harness import (
    AuditReport,
    ExperimentConfig,
    cells_to_rows,
    emit,
    rows_to_csv_text,
    rows_to_json_text,
    run_asymptotics_check,
    run_bounds_sweep,
    run_identity_audits,
    run_meta_sweep,
    run_oracle_check,
    run_single_task_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_AUDIT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infosens",
        description="Closed-form information-theoretic uncertainty sweeps "
        "for conjugate Gaussian regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "decompose": "single-task decomposition sweep over the N grid",
        "meta": "meta decomposition sweeps (vary M at fixed N, vary N at fixed M)",
        "asymptotics": "convergence-rate slope report over the N grid",
        "audit": "identity audits with standard errors",
        "oracle-check": "compare analytic values against the joint-Gaussian oracle",
        "bounds": "sensitivity sandwich sweep",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file mirroring ExperimentConfig")
        p.add_argument("--seed", type=int, help="override the root seed")
        p.add_argument("--samples", type=int, help="override mc_samples")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--quiet", action="store_true")
        if name == "audit":
            p.add_argument(
                "--chain-weighting",
                choices=("linear", "flat"),
                default="linear",
                help=argparse.SUPPRESS,
            )
    return parser


def _load_config(args: argparse.Namespace, mode: str) -> ExperimentConfig:
    if args.config:
        ec = ExperimentConfig.from_json_file(args.config)
    else:
        ec = ExperimentConfig()
    ec = replace(ec, mode=mode)
    if args.seed is not None:
        ec = replace(ec, seed=args.seed)
    if args.samples is not None:
        ec = replace(ec, mc_samples=args.samples)
    ec.validate()
    return ec


def _write_rows(rows, args: argparse.Namespace) -> None:
    if args.out:
        emit(rows, args.out, args.format)
        if not args.quiet:
            print(f"wrote {len(rows)} rows to {args.out}")
    elif not args.quiet:
        text = rows_to_csv_text(rows) if args.format == "csv" else rows_to_json_text(rows)
        sys.stdout.write(text)


def _print_audit(report: AuditReport, quiet: bool) -> None:
    if quiet:
        return
    for audit in report.audits:
        kind = "exact" if audit.exact else "3-SE"
        status = "PASS" if audit.passed else "FAIL"
        print(
            f"{status} {audit.name}: residual {audit.residual:+.3e} "
            f"(SE {audit.stderr:.3e}, max |r| {audit.max_abs_residual:.3e}, "
            f"{kind}, n={audit.n_samples})"
        )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "decompose":
            ec = _load_config(args, "single_task")
            rows = cells_to_rows(run_single_task_sweep(ec))
            _write_rows(rows, args)
            return EXIT_OK
        if args.command == "meta":
            ec = _load_config(args, "meta")
            rows = cells_to_rows(run_meta_sweep(ec))
            _write_rows(rows, args)
            return EXIT_OK
        if args.command == "bounds":
            ec = _load_config(args, "bounds")
            rows = cells_to_rows(run_bounds_sweep(ec))
            _write_rows(rows, args)
            return EXIT_OK
        if args.command == "asymptotics":
            ec = _load_config(args, "asymptotics")
            report, cells = run_asymptotics_check(ec)
            _write_rows(cells_to_rows(cells), args)
            if not args.quiet:
                print(
                    f"slope(sensitivity) = {report.slope_sens:.4f}, "
                    f"slope(mi rate) = {report.slope_mi_rate:.4f}, "
                    f"tail of N*sensitivity decreasing: {report.tail_decreasing}"
                )
            return EXIT_OK if report.passed else EXIT_AUDIT
        if args.command == "audit":
            ec = _load_config(args, "audit")
            report = run_identity_audits(ec, chain_weighting=args.chain_weighting)
            _print_audit(report, args.quiet)
            return EXIT_OK if report.passed else EXIT_AUDIT
        if args.command == "oracle-check":
            ec = _load_config(args, "oracle_check")
            report = run_oracle_check(ec)
            if not args.quiet:
                print(
                    f"oracle check: {report.n_single} single-task + "
                    f"{report.n_meta} meta configurations, "
                    f"max |analytic - oracle| = {report.max_abs_err:.3e}"
                )
            return EXIT_OK if report.passed else EXIT_AUDIT
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, InsufficientGrid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotPositiveDefinite, DegenerateDowndate) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfosensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
