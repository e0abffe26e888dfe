"""Command line entry point: ``antijam MODE --scenario PATH ...``.

Exit codes: 0 success, 1 configuration/validation error, 2 oracle
enumeration cap exceeded (oracle mode).
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import MODES, ConfigError, build_experiment, load_experiment
from .experiments import emit_outputs, run_experiment
from .oracle import EnumerationTooLarge

log = logging.getLogger("antijam")


def int_list(text: str) -> list[int]:
    """Parse ``"0,1,5-9"`` into ``[0, 1, 5, 6, 7, 8, 9]``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="antijam", description=__doc__.splitlines()[0])
    ap.add_argument("mode", choices=MODES)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="scenario file, or a bundled name such as reference_mission")
    src.add_argument("--experiment", help="experiment file with [experiment] and [learning] tables")
    ap.add_argument("--seeds", type=int_list, help="e.g. 0,1,2 or 0-49")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--b1", type=float)
    ap.add_argument("--b2", type=float)
    ap.add_argument("--q", type=float, help="jammer convergence threshold")
    ap.add_argument("--inner-q", type=float, help="UAV convergence threshold")
    ap.add_argument("--max-epochs", type=int)
    ap.add_argument("--max-slots", type=int)
    ap.add_argument("--channels", type=int_list)
    ap.add_argument("--pj-grid", type=float_list)
    ap.add_argument("--pn-grid", type=float_list)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--random-draws", type=int)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    learning = {
        "b1": args.b1,
        "b2": args.b2,
        "q_threshold": args.q,
        "inner_q_threshold": args.inner_q,
        "max_epochs": args.max_epochs,
        "max_slots": args.max_slots,
    }
    try:
        if args.experiment:
            spec = load_experiment(args.experiment)
            # command line values override the file
            overrides = {k: v for k, v in learning.items() if v is not None}
            spec = build_experiment(
                spec.scenario_path,
                mode=args.mode,
                learning={**spec.learning.as_dict(), **overrides, "seed": None},
                seeds=args.seeds or spec.seeds,
                channels=args.channels or spec.channels,
                pj_grid=args.pj_grid or spec.pj_grid,
                pn_grid=args.pn_grid or spec.pn_grid,
                out_dir=args.out or spec.out_dir,
                workers=args.workers or spec.workers,
                random_draws=args.random_draws or spec.random_draws,
                oracle_cap=spec.oracle_cap,
            )
        else:
            spec = build_experiment(
                args.scenario,
                mode=args.mode,
                learning=learning,
                seeds=args.seeds,
                channels=args.channels,
                pj_grid=args.pj_grid,
                pn_grid=args.pn_grid,
                out_dir=args.out,
                workers=args.workers,
                random_draws=args.random_draws,
            )
    except ConfigError as exc:
        print(f"antijam: invalid configuration ({exc.path or 'arguments'}):", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return 1

    log.info("mode=%s scenario=%s seeds=%s", spec.mode, spec.scenario.name, list(spec.seeds))
    try:
        output = run_experiment(spec)
    except EnumerationTooLarge as exc:
        print(f"antijam: {exc}", file=sys.stderr)
        return 2
    outdir = emit_outputs(spec, output)
    print(f"wrote {len(output.records)} records to {outdir / 'summary.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
