"""Command-line entry points.

    roughwell bound-states --config cfg.ini
    roughwell paths gen|norms --config cfg.ini
    roughwell evolve|nls|modulation|kernel-norm|ionization-sweep --config cfg.ini
    roughwell report --run runs/<id>
    roughwell export --run runs/<id> --kind decay_fit --out plot.csv

Output root: --outdir or the ROUGHWELL_OUTDIR environment variable.
Errors print a machine-readable JSON object on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys

from .runner import ConfigError, export_plot_data, report_run, run_experiment


def _add_run_args(p):
    p.add_argument("--config", required=True)
    p.add_argument("--outdir", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roughwell")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("bound-states", "evolve", "nls", "modulation",
                 "kernel-norm", "ionization-sweep"):
        _add_run_args(sub.add_parser(name))
    paths = sub.add_parser("paths")
    psub = paths.add_subparsers(dest="paths_command", required=True)
    for name in ("gen", "norms"):
        _add_run_args(psub.add_parser(name))
    rep = sub.add_parser("report")
    rep.add_argument("--run", required=True)
    exp = sub.add_parser("export")
    exp.add_argument("--run", required=True)
    exp.add_argument("--kind", required=True,
                     choices=["decay_fit", "ionization_curve", "slope_sweep", "norm_ratio"])
    exp.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            print(json.dumps(report_run(args.run), indent=1, sort_keys=True))
            return 0
        if args.command == "export":
            out = export_plot_data(args.run, args.kind, args.out)
            print(out)
            return 0
        if args.command == "paths":
            sub = f"paths-{args.paths_command}"
        else:
            sub = args.command
        man = run_experiment(args.config, sub, outdir=args.outdir,
                             seed=args.seed, workers=args.workers)
        print(json.dumps({"run_id": man["run_id"], "flags": man["flags"]},
                         indent=1, sort_keys=True))
        return 0
    except ConfigError as exc:
        json.dump({"error": "config", "field": exc.field_name, "message": str(exc)},
                  sys.stderr, indent=1)
        sys.stderr.write("\n")
        return 2
    except (FileNotFoundError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, indent=1)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
