"""Command line interface.

`dworkgauss --p 3 --d 2` runs the verification suite and prints a text or
JSON report (exit code 0 = all pass, 1 = failures, 2 = ambiguous cases
only).  `dworkgauss report --p 3 --d 2 --outdir out/` additionally writes
the report as CSV and JSON and renders the diagnostic figures next to
them.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .dwork import coeff_valuation
from .verify import (
    ALL_CHECK_FAMILIES,
    CheckReport,
    RunConfig,
    emit_report,
    run_suite,
)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--p", type=int, required=True, help="odd prime")
    parser.add_argument("--d", type=int, required=True, help="residue degree of K")
    parser.add_argument("--eps", default="all",
                        help="'all' or the index of one unit class")
    parser.add_argument("--precision", type=int, default=8,
                        help="target absolute precision in p-digits")
    parser.add_argument("--checks", default=",".join(ALL_CHECK_FAMILIES),
                        help="comma-separated check families")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ceiling", type=int, default=125,
                        help="refuse runs with p^d above this")
    parser.add_argument("--stretch", action="store_true",
                        help="include the (skipped) explicit-closure mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dworkgauss",
        description="Exact verification of the norm-resolvent / twisted Gauss "
                    "sum product identity for wildly-and-weakly ramified "
                    "degree-p extensions of unramified p-adic fields.")
    sub = parser.add_subparsers(dest="command")
    pv = sub.add_parser("verify", help="run the check suite (default)")
    _add_common(pv)
    pv.add_argument("--format", choices=("text", "json"), default="text")
    pv.add_argument("--out", help="write the report here instead of stdout")
    pv.add_argument("--golden", action="store_true",
                    help="timing-free JSON for snapshot comparisons")
    pr = sub.add_parser("report", help="write CSV/JSON report plus figures")
    _add_common(pr)
    pr.add_argument("--outdir", required=True)
    return parser


def _config(args) -> RunConfig:
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    unknown = [c for c in checks if c not in ALL_CHECK_FAMILIES]
    if unknown:
        raise SystemExit(f"unknown check families: {', '.join(unknown)}")
    return RunConfig(p=args.p, d=args.d, eps=args.eps, precision=args.precision,
                     checks=checks, seed=args.seed, ceiling=args.ceiling,
                     stretch=args.stretch,
                     golden=getattr(args, "golden", False))


def cmd_verify(args) -> int:
    cfg = _config(args)
    reports, code = run_suite(cfg)
    text = emit_report(reports, args.format, golden=args.golden, cfg=cfg)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


def cmd_report(args) -> int:
    cfg = _config(args)
    reports, code = run_suite(cfg)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.json").write_text(
        emit_report(reports, "json", golden=False, cfg=cfg) + "\n")
    _write_csv(outdir / "report.csv", reports)
    _render_figures(outdir, cfg, reports)
    print(f"wrote report.csv, report.json and figures to {outdir}")
    return code


def _write_csv(path: Path, reports: list[CheckReport]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "anchor", "p", "d", "eps", "j", "status",
                         "precision", "ms", "witness"])
        for r in reports:
            writer.writerow([r.check, r.anchor, r.params["p"], r.params["d"],
                             r.params.get("eps"), r.params.get("j"), r.status,
                             r.precision, r.ms,
                             json.dumps(r.witness, sort_keys=True)])


def _render_figures(outdir: Path, cfg: RunConfig, reports: list[CheckReport]):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .dwork import dwork_coeffs

    # coefficient valuations of the exponential series against the bound
    series = dwork_coeffs(cfg.p, cfg.precision + 4)
    ns, vals = [], []
    for n, row in enumerate(series.coeffs):
        v = coeff_valuation(cfg.p, row)
        if v is not None:
            ns.append(n)
            vals.append(float(v))
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(ns, vals, ".", ms=4, label="ord of coefficient n")
    bound = [n * (cfg.p - 1) / cfg.p**2 for n in ns]
    ax.plot(ns, bound, "-", lw=1, label="certified bound n(p-1)/p^2")
    ax.set_xlabel("coefficient index n")
    ax.set_ylabel("p-adic order")
    ax.set_title(f"Exponential series coefficient valuations (p={cfg.p})")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(outdir / "fig_series_valuations.png", dpi=150)
    plt.close(fig)

    # status grid over (check, case)
    order = {"pass": 0, "ambiguous": 1, "skipped": 2, "fail": 3}
    colors = ["#2a9d4e", "#e0a800", "#9aa0a6", "#d03025"]
    checks = sorted({r.check for r in reports})
    cases = sorted({(str(r.params.get("eps")), str(r.params.get("j")))
                    for r in reports})
    grid = [[None] * len(cases) for _ in checks]
    for r in reports:
        i = checks.index(r.check)
        jdx = cases.index((str(r.params.get("eps")), str(r.params.get("j"))))
        cur = grid[i][jdx]
        s = order[r.status]
        grid[i][jdx] = s if cur is None else max(cur, s)
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(cases) + 3),
                                    0.35 * len(checks) + 2))
    for i, row in enumerate(grid):
        for jdx, s in enumerate(row):
            if s is None:
                continue
            ax.add_patch(plt.Rectangle((jdx, len(checks) - 1 - i), 0.92, 0.92,
                                       color=colors[s]))
    ax.set_xlim(0, len(cases))
    ax.set_ylim(0, len(checks))
    ax.set_xticks([c + 0.5 for c in range(len(cases))])
    ax.set_xticklabels([f"{e},{j}" for e, j in cases], rotation=90, fontsize=7)
    ax.set_yticks([c + 0.5 for c in range(len(checks))])
    ax.set_yticklabels(list(reversed(checks)), fontsize=7)
    ax.set_xlabel("case (unit class coords, character exponent)")
    ax.set_title(f"Check outcomes p={cfg.p}, d={cfg.d} "
                 "(green pass, amber ambiguous, gray skipped, red fail)")
    fig.tight_layout()
    fig.savefig(outdir / "fig_check_grid.png", dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in ("verify", "report", "-h", "--help"):
        argv = ["verify"] + argv
    args = build_parser().parse_args(argv)
    if args.command == "report":
        return cmd_report(args)
    if args.command == "verify":
        return cmd_verify(args)
    build_parser().print_help()
    return 0


if __name__ == "__main__":
    sys.exit(main())
