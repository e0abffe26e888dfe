"""Experiment drivers (single runs, sweeps, comparisons) and output files."""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentSpec
from .game import PeriodContext
from .oracle import (
    EnumerationTooLarge,
    Selector,
    noncooperative_reference,
    random_baseline_loss,
    solve_stackelberg,
)
from .scenario import Scenario
from .sla import LearningConfig, RunResult, learner_rng, run_all_periods

ALGORITHMS = ("proposed", "best_ne", "worst_ne", "random", "noncooperative")

# learner ids for the baselines' random streams, clear of UAV ids
RANDOM_STREAM = 1 << 20
NONCOOP_STREAM = (1 << 20) + 1

SUMMARY_COLUMNS = (
    "mode",
    "n_channels",
    "p_jammer",
    "p_uav",
    "seed",
    "algorithm",
    "total_loss",
    "epochs_used",
    "slots_used",
    "converged",
    "jammer_channels",
    "uav_channels",
    "status",
)


@dataclass
class SummaryRecord:
    mode: str
    n_channels: int
    p_jammer: float
    p_uav: float  # mean UAV power
    seed: int
    algorithm: str
    total_loss: float  # summed over periods
    epochs_used: int = 0
    slots_used: int = 0
    converged: int = 1
    jammer_channels: str = ""
    uav_channels: str = ""
    status: str = "ok"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm label {self.algorithm!r}")


def _fmt_channels(chs) -> str:
    return ";".join(str(c) for c in chs)


def _fmt_profiles(profiles) -> str:
    return ";".join("-".join(str(c) for c in p) for p in profiles)


def _point(scenario: Scenario) -> dict:
    return dict(
        n_channels=scenario.n_channels,
        p_jammer=float(scenario.p_jammer),
        p_uav=float(np.mean(scenario.p_uav)),
    )


def proposed_record(mode: str, scenario: Scenario, run: RunResult) -> SummaryRecord:
    return SummaryRecord(
        mode=mode,
        seed=run.seed,
        algorithm="proposed",
        total_loss=run.total_loss,
        epochs_used=run.epochs_used,
        slots_used=run.slots_used,
        converged=int(run.converged),
        jammer_channels=_fmt_channels(run.jammer_channels),
        uav_channels=_fmt_profiles(run.uav_channels),
        **_point(scenario),
    )


@dataclass
class OraclePeriod:
    period: int
    se_channel: int
    best_ne: tuple[int, ...]
    best_loss: float
    worst_ne: tuple[int, ...]
    worst_loss: float
    n_equilibria: int
    verified: bool
    worst_selector_se_channel: int


def oracle_summary(scenario: Scenario, cap: int) -> list[OraclePeriod]:
    """Stackelberg solution per period; follower NE ranked at the SE channel."""
    out = []
    for z in range(1, scenario.n_periods + 1):
        ctx = PeriodContext(scenario, z)
        rep = solve_stackelberg(ctx, Selector.BEST_NE, cap)
        worst_sel = solve_stackelberg(ctx, Selector.WORST_NE, reports=rep.ne_reports)
        ne = rep.ne_reports[rep.se_channel]
        out.append(
            OraclePeriod(
                period=z,
                se_channel=rep.se_channel,
                best_ne=ne.best_ne.uav_channels,
                best_loss=ne.best_ne.total_loss,
                worst_ne=ne.worst_ne.uav_channels,
                worst_loss=ne.worst_ne.total_loss,
                n_equilibria=len(ne.equilibria),
                verified=rep.verified,
                worst_selector_se_channel=worst_sel.se_channel,
            )
        )
    return out


def oracle_records(mode: str, scenario: Scenario, oracle: list[OraclePeriod], seed: int) -> list[SummaryRecord]:
    se = _fmt_channels(o.se_channel for o in oracle)
    ok = int(all(o.verified for o in oracle))
    return [
        SummaryRecord(
            mode=mode, seed=seed, algorithm="best_ne",
            total_loss=float(sum(o.best_loss for o in oracle)),
            converged=ok, jammer_channels=se,
            uav_channels=_fmt_profiles(o.best_ne for o in oracle), **_point(scenario),
        ),
        SummaryRecord(
            mode=mode, seed=seed, algorithm="worst_ne",
            total_loss=float(sum(o.worst_loss for o in oracle)),
            converged=ok, jammer_channels=se,
            uav_channels=_fmt_profiles(o.worst_ne for o in oracle), **_point(scenario),
        ),
    ]


def baseline_records(
    mode: str, scenario: Scenario, oracle: list[OraclePeriod], seed: int, draws: int
) -> list[SummaryRecord]:
    rand_total, nc_total, nc_ok, nc_profiles = 0.0, 0.0, True, []
    for o in oracle:
        ctx = PeriodContext(scenario, o.period)
        rand_total += random_baseline_loss(ctx, learner_rng(seed, o.period, RANDOM_STREAM), draws)
        nc = noncooperative_reference(ctx, o.se_channel, learner_rng(seed, o.period, NONCOOP_STREAM))
        nc_total += nc.total_loss
        nc_ok &= nc.converged
        nc_profiles.append(nc.uav_channels)
    se = _fmt_channels(o.se_channel for o in oracle)
    return [
        SummaryRecord(mode=mode, seed=seed, algorithm="random", total_loss=rand_total, **_point(scenario)),
        SummaryRecord(
            mode=mode, seed=seed, algorithm="noncooperative", total_loss=nc_total,
            converged=int(nc_ok), jammer_channels=se, uav_channels=_fmt_profiles(nc_profiles),
            **_point(scenario),
        ),
    ]


def _failed_records(mode, scenario, seed, labels, status) -> list[SummaryRecord]:
    return [
        SummaryRecord(mode=mode, seed=seed, algorithm=a, total_loss=0.0, converged=0, status=status,
                      **_point(scenario))
        for a in labels
    ]


# --- work units (module level so worker processes can pickle them) ----------


def _proposed_task(args):
    mode, scenario, config = args
    run = run_all_periods(scenario, config)
    return proposed_record(mode, scenario, run), run


def _compare_task(args):
    mode, scenario, config, oracle, draws = args
    rec, run = _proposed_task((mode, scenario, config))
    seed = config.seed
    if isinstance(oracle, str):
        return [rec, *_failed_records(mode, scenario, seed, ALGORITHMS[1:], oracle)], run
    return [
        rec,
        *oracle_records(mode, scenario, oracle, seed),
        *baseline_records(mode, scenario, oracle, seed, draws),
    ], run


def _oracle_task(args):
    scenario, cap = args
    try:
        return oracle_summary(scenario, cap)
    except EnumerationTooLarge as exc:
        return f"oracle_cap_exceeded: {exc}"


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as pool:
        # map() keeps input order, so files do not depend on completion order
        return list(pool.map(fn, tasks))


@dataclass
class ExperimentOutput:
    records: list[SummaryRecord]
    runs: dict  # seed -> RunResult, filled for single-scenario modes
    details: dict  # extra manifest content


def run_seeds(spec: ExperimentSpec) -> ExperimentOutput:
    tasks = [("run", spec.scenario, spec.config_for(s)) for s in spec.seeds]
    results = _map(_proposed_task, tasks, spec.workers)
    runs = {run.seed: run for _, run in results}
    details = {
        "runs": [
            {
                "seed": run.seed,
                "total_loss": run.total_loss,
                "jammer_channels": list(run.jammer_channels),
                "uav_channels": [list(p) for p in run.uav_channels],
                "epochs_used": [p.epochs_used for p in run.periods],
                "slots_used": [p.slots_used for p in run.periods],
                "converged": run.converged,
            }
            for run in runs.values()
        ]
    }
    return ExperimentOutput([r for r, _ in results], runs, details)


def run_oracle(spec: ExperimentSpec) -> ExperimentOutput:
    """Raises ``EnumerationTooLarge`` when the profile space is over the cap."""
    oracle = oracle_summary(spec.scenario, spec.oracle_cap)
    seed = spec.seeds[0] if spec.seeds else 0
    details = {"oracle": [asdict(o) for o in oracle]}
    return ExperimentOutput(oracle_records("oracle", spec.scenario, oracle, seed), {}, details)


def run_channel_sweep(spec: ExperimentSpec) -> ExperimentOutput:
    tasks = [
        ("sweep-channels", spec.scenario.with_changes(n_channels=int(m)), spec.config_for(s))
        for m in spec.channels
        for s in spec.seeds
    ]
    results = _map(_proposed_task, tasks, spec.workers)
    return ExperimentOutput([r for r, _ in results], {}, {"channels": list(spec.channels)})


def run_compare(spec: ExperimentSpec) -> ExperimentOutput:
    points = [spec.scenario.with_changes(n_channels=int(m)) for m in spec.channels]
    oracles = _map(_oracle_task, [(p, spec.oracle_cap) for p in points], spec.workers)
    tasks = [
        ("compare", p, spec.config_for(s), o, spec.random_draws)
        for p, o in zip(points, oracles)
        for s in spec.seeds
    ]
    results = _map(_compare_task, tasks, spec.workers)
    records = [r for recs, _ in results for r in recs]
    details = {
        "channels": list(spec.channels),
        "oracle": {
            str(p.n_channels): (o if isinstance(o, str) else [asdict(x) for x in o])
            for p, o in zip(points, oracles)
        },
    }
    return ExperimentOutput(records, {}, details)


def run_power_sweep(spec: ExperimentSpec) -> ExperimentOutput:
    tasks = [
        ("sweep-power", spec.scenario.with_changes(p_jammer=float(pj), p_uav=float(pn)), spec.config_for(s))
        for pj in spec.pj_grid
        for pn in spec.pn_grid
        for s in spec.seeds
    ]
    results = _map(_proposed_task, tasks, spec.workers)
    records = [r for r, _ in results]
    means = {}
    for r in records:
        means.setdefault((r.p_jammer, r.p_uav), []).append(r.total_loss)
    details = {
        "pj_grid": list(spec.pj_grid),
        "pn_grid": list(spec.pn_grid),
        "mean_total_loss": [
            {"p_jammer": k[0], "p_uav": k[1], "mean": float(np.mean(v))} for k, v in means.items()
        ],
    }
    return ExperimentOutput(records, {}, details)


RUNNERS = {
    "run": run_seeds,
    "oracle": run_oracle,
    "sweep-channels": run_channel_sweep,
    "sweep-power": run_power_sweep,
    "compare": run_compare,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentOutput:
    return RUNNERS[spec.mode](spec)


# --- files ------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)  # shortest round-trip form
    return str(v)


def write_summary(records: list[SummaryRecord], path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in records:
            row = asdict(r)
            w.writerow([_cell(row[c]) for c in SUMMARY_COLUMNS])


def write_traces(run: RunResult, outdir: Path) -> list[Path]:
    """One file per (period, learner): strategy rows indexed by iteration."""
    written = []
    for p in run.periods:
        m = p.jammer_trace.shape[1]
        head = ["iteration", "epoch"] + [f"p{c}" for c in range(1, m + 1)]
        path = outdir / f"trace_{p.period}_jammer.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(head)
            for k, row in enumerate(p.jammer_trace):
                w.writerow([k, k] + [repr(float(x)) for x in row])
        written.append(path)
        epochs = np.concatenate([[0], p.slot_epoch])
        for n in range(p.uav_trace.shape[1]):
            path = outdir / f"trace_{p.period}_uav{n + 1}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(head)
                for t, row in enumerate(p.uav_trace[:, n, :]):
                    w.writerow([t, int(epochs[t])] + [repr(float(x)) for x in row])
            written.append(path)
    return written


def emit_outputs(spec: ExperimentSpec, output: ExperimentOutput, outdir: str | Path | None = None) -> Path:
    outdir = Path(outdir or spec.out_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        write_summary(output.records, outdir / "summary.csv")
        for seed, run in output.runs.items():
            sub = outdir / f"seed_{seed}"
            sub.mkdir(exist_ok=True)
            write_traces(run, sub)
        manifest = {
            "software": "antijam",
            "version": __version__,
            "mode": spec.mode,
            "scenario": spec.scenario.name,
            "scenario_path": spec.scenario_path,
            "seeds": list(spec.seeds),
            "config_hash": spec.config_hash(),
            "learning": {k: v for k, v in spec.learning.as_dict().items() if k != "seed"},
            "summary_columns": list(SUMMARY_COLUMNS),
            "n_records": len(output.records),
            **output.details,
        }
        with open(outdir / "result.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write outputs under {outdir}: {exc}") from exc
    return outdir


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, tuple):
        return list(o)
    if isinstance(o, LearningConfig):
        return o.as_dict()
    raise TypeError(f"not serializable: {type(o)}")
