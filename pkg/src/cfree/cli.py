"""Command line harness: ``cfree verify`` runs verification suites and
``cfree moments`` computes moment tables and R-transform coefficients for
operator pairs loaded from JSON matrix files.

Exit codes: 0 all checks pass, 1 at least one failed check, 2 invalid
configuration or malformed input.  The CFREE_LOG environment variable
(quiet | info | debug) controls verbosity only.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import numkernel as nk
from .embeddings import OperatorPair
from .errors import CFreeError, ConfigError
from .reports import write_csv, write_jsonl
from .series import cfree_r_transform
from .spaces import ALPHA, BETA
from .states import MomentData, moment_data, moments_of_matrix
from .suites import SUITES, RunConfig, run_suite

log = logging.getLogger("cfree")


def _setup_logging():
    level = {"quiet": logging.WARNING, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("CFREE_LOG", "info"),
                                         logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _parse_dims(text: str):
    try:
        dims = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad dims {text!r}: expected d,d,d,d") from exc
    if len(dims) != 4:
        raise ConfigError(f"bad dims {text!r}: expected four comma-separated integers")
    return dims


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfree",
        description="verify the truncated two-state product construction and "
                    "compute its transform tower")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--dims", default="3,3,3,3",
                   help="H_alpha,K_alpha,H_beta,K_beta (default 3,3,3,3)")
    v.add_argument("--depth", type=int, default=None,
                   help="truncation depth (per-suite default when omitted)")
    v.add_argument("--order", type=int, default=None,
                   help="series order for the series suites")
    v.add_argument("--seed", type=int, default=0, help="64-bit trial seed")
    v.add_argument("--trials", type=int, default=None,
                   help="number of seeded trials (per-suite default when omitted)")
    v.add_argument("--tol", type=float, default=1e-9, help="check tolerance")
    v.add_argument("--out", default="reports", help="report output directory")
    v.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    v.add_argument("--no-figures", action="store_true",
                   help="skip the residual figures")
    v.add_argument("--trace", action="store_true",
                   help="dump (z, t1, t2, t3, t, residuals) tuples as CSV "
                        "(linearization-analytic suite)")

    m = sub.add_parser("moments", help="moment tables and R-transform coefficients")
    m.add_argument("--t-alpha", required=True, help="JSON matrix file for T_alpha")
    m.add_argument("--s-alpha", required=True, help="JSON matrix file for S_alpha")
    m.add_argument("--t-beta", required=True, help="JSON matrix file for T_beta")
    m.add_argument("--s-beta", required=True, help="JSON matrix file for S_beta")
    m.add_argument("--order", type=int, default=8)
    m.add_argument("--depth", type=int, default=None,
                   help="truncation depth (default order + 2)")
    m.add_argument("--out", default="reports")
    m.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    return parser


def _print_summary(results) -> bool:
    header = f"{'suite':<24} {'checks':>7} {'max abs err':>13} {'result':>8}"
    print(header)
    print("-" * len(header))
    all_pass = True
    for suite, (reports, notes) in results.items():
        worst = max((r.abs_err for r in reports
                     if not r.name.startswith("negative-control")), default=0.0)
        ok = all(r.passed for r in reports)
        all_pass = all_pass and ok
        print(f"{suite:<24} {len(reports):>7} {worst:>13.3e} "
              f"{'pass' if ok else 'FAIL':>8}")
        for note in notes:
            log.info(note)
    return all_pass


def cmd_verify(args) -> int:
    cfg = RunConfig(suite=args.suite, dims=_parse_dims(args.dims), depth=args.depth,
                    order=args.order, seed=args.seed, trials=args.trials,
                    tol=args.tol, out=args.out, fmt=args.fmt,
                    figures=not args.no_figures, trace=args.trace)
    results = run_suite(cfg)

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_rows = []
    for suite, (reports, _notes) in results.items():
        if cfg.fmt == "json":
            write_jsonl(out_dir / f"{suite}.jsonl", suite, reports)
        csv_rows.extend((suite, r) for r in reports)
    write_csv(out_dir / "summary.csv", csv_rows)
    if cfg.trace and cfg.trace_rows:
        import csv as _csv
        with open(out_dir / "linearization-analytic.trace.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["trial", "z_re", "z_im", "t1_re", "t1_im", "t2_re",
                             "t2_im", "t3_re", "t3_im", "t_re", "t_im",
                             "identity_resid", "t_resid"])
            for row in cfg.trace_rows:
                writer.writerow([row["trial"], *row["z"], *row["t1"], *row["t2"],
                                 *row["t3"], *row["t"],
                                 repr(row["identity_resid"]), repr(row["t_resid"])])
    if cfg.figures:
        from .figures import render_residual_figure
        for suite, (reports, _notes) in results.items():
            if reports:
                render_residual_figure(out_dir / f"{suite}.png", suite, reports)

    all_pass = _print_summary(results)
    log.info("reports written to %s", out_dir)
    return 0 if all_pass else 1


def _load_matrix(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        m = nk.matrix_from_json(data)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"malformed matrix file {path}: {exc}") from exc
    if m.shape[0] != m.shape[1]:
        raise ConfigError(f"matrix in {path} is not square: {m.shape}")
    return m


def _write_moment_files(out_dir: Path, tag: str, md: MomentData, fmt: str):
    if fmt == "csv":
        (out_dir / f"moments_{tag}.csv").write_text(md.to_csv(), encoding="utf-8")
    else:
        (out_dir / f"moments_{tag}.json").write_text(md.to_json() + "\n",
                                                     encoding="utf-8")


def cmd_moments(args) -> int:
    order = args.order
    if order < 1:
        raise ConfigError("order must be >= 1")
    depth = args.depth if args.depth is not None else order + 2
    if depth < order:
        raise ConfigError("depth must be >= order")
    t_a = _load_matrix(args.t_alpha)
    s_a = _load_matrix(args.s_alpha)
    t_b = _load_matrix(args.t_beta)
    s_b = _load_matrix(args.s_beta)

    from .analytic import realize_cfree_pair
    pair_a = OperatorPair(ALPHA, t_a, s_a)
    pair_b = OperatorPair(BETA, t_b, s_b)
    real = realize_cfree_pair(pair_a, pair_b, depth)

    tables = {
        "a": MomentData(order, moments_of_matrix(t_a, order),
                        moments_of_matrix(s_a, order)),
        "b": MomentData(order, moments_of_matrix(t_b, order),
                        moments_of_matrix(s_b, order)),
        "sum": moment_data(real.lam_a + real.lam_b, real.lam_sa + real.lam_sb, order),
    }

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for tag, md in tables.items():
        _write_moment_files(out_dir, tag, md, args.fmt)
        r = cfree_r_transform(md)
        obj = {"element": tag, "r_transform": r.to_json_obj()}
        (out_dir / f"rtransform_{tag}.json").write_text(
            json.dumps(obj, sort_keys=False) + "\n", encoding="utf-8")
        coeffs = ", ".join(f"{r.coefficient(n).real:+.6g}{r.coefficient(n).imag:+.6g}j"
                           for n in range(0, min(r.order, order - 1) + 1))
        print(f"R[{tag}](z) coefficients (z^0..): {coeffs}")
    log.info("moment tables written to %s", out_dir)
    return 0


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_moments(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CFreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
