"""Command line interface: ``wbdg run | sweep-convergence | sweep-pulse | run-disc | report``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .diagnostics import read_report_csv, write_report_csv
from .euler import AdmissibilityError
from .runner import (
    ConfigError,
    DISC_ANNULUS,
    density_deviation,
    output_dir,
    parse_config,
    run_convergence,
    run_disc,
    run_pulse_sweep,
    run_single,
)


def _config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    p.add_argument("--case")
    p.add_argument("--scheme", type=str.upper, help="DG or WBDG")
    p.add_argument("--order", type=int)
    p.add_argument("--n", dest="N", type=int, help="cells per axis")
    p.add_argument("--cfl", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--rotations", type=float)
    p.add_argument("--strategy", help="mem (stored) or rec (recompute)")
    lim = p.add_mutually_exclusive_group()
    lim.add_argument("--limiter", dest="limiter", action="store_const", const=True)
    lim.add_argument("--no-limiter", dest="limiter", action="store_const", const=False)
    p.add_argument("--limiter-eps", dest="limiter_eps", type=float)
    p.add_argument("--output-every", dest="output_every", type=float)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--samples-per-cell", dest="samples_per_cell", type=int)
    p.add_argument("--l1-points", dest="l1_points", type=int)
    p.add_argument("--reference", help="snapshot file used as the error reference")
    p.add_argument("--printed-tableau", dest="printed_tableau", action="store_const", const=True)
    p.add_argument("--seed", type=int)


_KEYS = ("case", "scheme", "order", "N", "cfl", "eta", "t_final", "rotations", "strategy", "limiter",
         "limiter_eps", "output_every", "output_dir", "samples_per_cell", "l1_points", "reference",
         "printed_tableau", "seed")


def _config(args, **extra):
    overrides = {k: getattr(args, k, None) for k in _KEYS}
    overrides.update({k: v for k, v in extra.items() if v is not None})
    return parse_config(args.config, **overrides)


def _print_rows(rows, out=None):
    if not rows:
        return
    out = out or sys.stdout
    cols = list(rows[0])
    widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)) + "\n")
    for r in rows:
        out.write("  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)) + "\n")


def cmd_run(args) -> int:
    cfg = _config(args, write_snapshots=True)
    snap, report = run_single(cfg)
    out = output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"report_{cfg.case}_{cfg.label}_N{cfg.N}.csv"
    write_report_csv([report], path)
    _print_rows(report.rows())
    if report.failed:
        print(f"run failed at t={snap.time:.6g}: {report.failed}", file=sys.stderr)
        return 1
    print(f"steps={report.steps} runtime={report.runtime_s:.2f}s report={path}")
    return 0


def cmd_sweep_convergence(args) -> int:
    cfg = _config(args)
    out = output_dir(cfg)
    path = out / f"convergence_{cfg.case}.csv"
    reports = run_convergence(cfg, args.ns, args.orders, args.schemes, csv_path=path)
    rows = [r for rep in reports for r in rep.rows()]
    _print_rows(rows)
    print(f"wrote {path}")
    return 1 if any(r.failed for r in reports) else 0


def cmd_sweep_pulse(args) -> int:
    out = Path(args.output_dir) if args.output_dir else output_dir()
    rows = run_pulse_sweep(args.case, args.etas, args.labels, N=args.n, t_final=args.t_final,
                           reference_N=args.reference_n, out=out,
                           samples_per_cell=args.samples_per_cell)
    table = [dict(eta=f"{r['eta']:g}", label=r["label"], N=r["N"],
                  l1_to_reference=f"{r['l1_to_reference']:.3e}",
                  ratio_to_pulse=f"{r['l1_to_reference'] / r['pulse_l1']:.3e}",
                  failed="yes" if r["failed"] else "") for r in rows]
    _print_rows(table)
    print(f"wrote {out / f'pulse_{args.case}_summary.csv'}")
    return 1 if any(r["failed"] for r in rows) else 0


def cmd_run_disc(args) -> int:
    cfg = _config(args, case="disc")
    out = output_dir(cfg)
    snaps, report, _ = run_disc(cfg, out=out)
    rows = []
    for s in snaps:
        coords, dev = density_deviation(s, cfg.samples_per_cell)
        path = out / f"disc_{cfg.label}_N{cfg.N}_eta{cfg.eta:g}_t{s.time:.6g}_drho.csv"
        cols = [c.ravel() for c in coords] + [dev.ravel()]
        np.savetxt(path, np.column_stack(cols), delimiter=",", header="x,y,drho", comments="",
                   fmt="%.17g")
        r = np.hypot(*coords)
        ring = (r > DISC_ANNULUS[0]) & (r < DISC_ANNULUS[1])
        rows.append(dict(time=f"{s.time:.4f}", max_drho_annulus=f"{np.abs(dev[ring]).max():.3e}",
                         file=path.name))
    _print_rows(rows)
    if report.failed:
        print(f"disc run failed: {report.failed}", file=sys.stderr)
        return 1
    print(f"steps={report.steps} runtime={report.runtime_s:.1f}s")
    return 0


def cmd_report(args) -> int:
    for path in args.files:
        rows = read_report_csv(path)
        print(f"# {path}")
        _print_rows(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wbdg", description="Well-balanced and classical RKDG runs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run with final error report")
    _config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-convergence", help="errors and slopes over resolutions and orders")
    _config_flags(p)
    p.add_argument("--ns", type=int, nargs="+", default=[8, 16, 32, 64])
    p.add_argument("--orders", type=int, nargs="+")
    p.add_argument("--schemes", type=str.upper, nargs="+")
    p.set_defaults(func=cmd_sweep_convergence)

    p = sub.add_parser("sweep-pulse", help="pressure pulse waveforms against a WBDG3 reference")
    p.add_argument("--case", default="hydro1d")
    p.add_argument("--etas", type=float, nargs="+", default=[1e-2, 1e-4, 1e-6, 1e-8])
    p.add_argument("--labels", nargs="+", default=["DG2", "WBDG2"])
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--t-final", type=float, default=0.25)
    p.add_argument("--reference-n", type=int)
    p.add_argument("--samples-per-cell", type=int, default=4)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_sweep_pulse)

    p = sub.add_parser("run-disc", help="planet-disc run with a snapshot per revolution")
    _config_flags(p)
    p.set_defaults(func=cmd_run_disc)

    p = sub.add_parser("report", help="pretty-print report CSV files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "run-disc":
        if args.N is None and args.config is None:
            args.N = 128
        if args.rotations is None and args.config is None:
            args.rotations = 1.0
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        ap.exit(2, f"wbdg: error: {exc}\n")
    except AdmissibilityError as exc:
        ap.exit(1, f"wbdg: inadmissible state: {exc}\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
