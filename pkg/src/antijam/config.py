"""Scenario and experiment files (TOML)."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .scenario import FadingDistribution, Position3, Scenario, UavTrajectory, validate_scenario
from .sla import LearningConfig

SCENARIO_SECTIONS = ("world", "uavs", "jammer", "fc", "channels", "fading", "constants")
MODES = ("run", "oracle", "sweep-channels", "sweep-power", "compare")
STOCHASTIC_MODES = ("run", "sweep-channels", "sweep-power", "compare")
BUILTIN_SCENARIOS = ("reference_mission",)


class ConfigError(ValueError):
    def __init__(self, problems, path=None):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(where + "; ".join(self.problems))


def _read_toml(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc}", path) from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # message carries "(at line L, column C)"
        raise ConfigError(f"parse error: {exc}", path) from exc


def resolve_scenario_path(ref: str | Path, base: Path | None = None) -> Path:
    """Accept a file path or the name of a bundled scenario."""
    p = Path(ref)
    if base is not None and not p.is_absolute() and (base / p).exists():
        return base / p
    if p.exists():
        return p
    name = p.name.removesuffix(".scenario")
    if name in BUILTIN_SCENARIOS:
        return Path(str(resources.files("antijam") / "data" / f"{name}.scenario"))
    raise ConfigError(f"scenario file not found: {ref}")


def _get(section: dict, key: str, where: str, problems: list, kind=float, default=None):
    if key not in section:
        if default is not None:
            return default
        problems.append(f"[{where}] missing field '{key}'")
        return None
    value = section[key]
    try:
        if kind is float:
            return float(value)
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise TypeError
            return int(value)
        if kind == "xy":
            x, y = value
            return (float(x), float(y))
        if kind == "floats":
            return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        problems.append(f"[{where}] field '{key}' has invalid value {value!r}")
        return None
    return value


def scenario_from_dict(data: dict, name: str = "") -> Scenario:
    missing = [s for s in SCENARIO_SECTIONS if s not in data]
    if missing:
        raise ConfigError([f"missing section [{s}]" for s in missing])
    problems: list[str] = []
    world, ch, jam, fc = data["world"], data["channels"], data["jammer"], data["fc"]
    fad, const = data["fading"], data["constants"]
    n_periods = _get(world, "n_periods", "world", problems, int)
    n_channels = _get(ch, "count", "channels", problems, int)
    uavs = data["uavs"]
    if isinstance(uavs, dict):
        uavs = [uavs]
    if not uavs:
        problems.append("[uavs] needs at least one UAV")

    trajs, powers = [], []
    for i, u in enumerate(uavs, start=1):
        where = f"uavs #{i}"
        alt = _get(u, "altitude", where, problems)
        powers.append(_get(u, "power", where, problems))
        if "waypoints" in u:
            try:
                wps = tuple((float(x), float(y)) for x, y in u["waypoints"])
            except (TypeError, ValueError):
                problems.append(f"[{where}] waypoints must be [x, y] pairs")
                continue
            trajs.append(UavTrajectory(i, alt, wps))
        else:
            start = _get(u, "start", where, problems, "xy")
            dest = _get(u, "destination", where, problems, "xy")
            if None not in (alt, start, dest, n_periods):
                trajs.append(UavTrajectory.straight(i, alt, start, dest, n_periods))

    jpos = _get(jam, "position", "jammer", problems, "xy")
    p_j = _get(jam, "power", "jammer", problems)
    fpos = _get(fc, "position", "fc", problems, "xy")
    fading = {}
    for side in ("jammer", "fc"):
        g = _get(fad, f"{side}_gains", "fading", problems, "floats")
        p = _get(fad, f"{side}_probs", "fading", problems, "floats")
        fading[side] = FadingDistribution(g or (), p or ())
    consts = {k: _get(const, k, "constants", problems) for k in ("noise_db", "alpha", "gain_scale", "c_f", "c_0", "w")}
    d0 = _get(const, "d0", "constants", problems, default=50.0)
    if problems:
        raise ConfigError(problems)

    s = Scenario(
        n_uavs=len(uavs),
        n_channels=n_channels,
        n_periods=n_periods,
        trajectories=tuple(trajs),
        jammer_pos=Position3(*jpos),
        fc_pos=Position3(*fpos),
        p_uav=tuple(powers),
        p_jammer=p_j,
        noise_n0_db=consts["noise_db"],
        alpha=consts["alpha"],
        gain_scale=consts["gain_scale"],
        c_f=consts["c_f"],
        c_0=consts["c_0"],
        w_const=consts["w"],
        fading_a=fading["jammer"],
        fading_j=fading["fc"],
        d0=d0,
        name=str(world.get("name", name)),
    )
    violations = validate_scenario(s)
    if violations:
        raise ConfigError(violations)
    return s


def load_scenario(path: str | Path) -> Scenario:
    path = resolve_scenario_path(path)
    data = _read_toml(path)
    try:
        return scenario_from_dict(data, name=path.stem)
    except ConfigError as exc:
        raise ConfigError(exc.problems, path) from None


@dataclass
class ExperimentSpec:
    scenario_path: str
    scenario: Scenario
    mode: str = "run"
    seeds: tuple[int, ...] = (0,)
    channels: tuple[int, ...] = (2, 3, 4, 5, 6)
    pj_grid: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    pn_grid: tuple[float, ...] = (2.0, 4.0, 6.0, 8.0, 10.0)
    out_dir: str = "out"
    learning: LearningConfig = field(default_factory=LearningConfig)
    workers: int = 1
    random_draws: int = 10_000
    oracle_cap: int = 10**7

    def config_for(self, seed: int) -> LearningConfig:
        return replace(self.learning, seed=int(seed))

    def config_hash(self) -> str:
        """Digest of everything that determines the numbers in the outputs."""
        payload = {
            "scenario": repr(self.scenario),
            "mode": self.mode,
            "seeds": list(self.seeds),
            "channels": list(self.channels),
            "pj_grid": list(self.pj_grid),
            "pn_grid": list(self.pn_grid),
            "learning": {k: v for k, v in self.learning.as_dict().items() if k != "seed"},
            "random_draws": self.random_draws,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


LEARNING_KEYS = {
    "b1": float,
    "b2": float,
    "q_threshold": float,
    "inner_q_threshold": float,
    "max_epochs": int,
    "max_slots": int,
    "reset_per_epoch": bool,
    "jammer_redraw": bool,
}


def build_experiment(
    scenario_path: str | Path,
    mode: str = "run",
    learning: dict | None = None,
    base: Path | None = None,
    **fields,
) -> ExperimentSpec:
    """Assemble and fully validate an experiment; all problems are reported together."""
    problems: list[str] = []
    try:
        spath = resolve_scenario_path(scenario_path, base)
        scenario = load_scenario(spath)
    except ConfigError as exc:
        raise ConfigError(exc.problems, exc.path or scenario_path) from None

    if mode not in MODES:
        problems.append(f"mode '{mode}' not one of {', '.join(MODES)}")

    overrides = {}
    for key, value in (learning or {}).items():
        if value is None:
            continue
        if key not in LEARNING_KEYS:
            problems.append(f"[learning] unknown field '{key}'")
            continue
        try:
            overrides[key] = LEARNING_KEYS[key](value)
        except (TypeError, ValueError):
            problems.append(f"[learning] field '{key}' has invalid value {value!r}")
    merged = {**LearningConfig().as_dict(), **overrides}
    lc_problems = LearningConfig.violations(_Shim(merged))
    problems.extend(f"range violation: {p}" for p in lc_problems)

    fields = {k: v for k, v in fields.items() if v is not None}
    for key in ("seeds", "channels", "pj_grid", "pn_grid"):
        if key in fields:
            fields[key] = tuple(fields[key])
    spec_kwargs = dict(scenario_path=str(spath), scenario=scenario, mode=mode, **fields)

    seeds = spec_kwargs.get("seeds", ExperimentSpec.seeds)
    if mode in STOCHASTIC_MODES and not seeds:
        problems.append(f"mode '{mode}' needs at least one seed")
    if any(not 0 <= int(s) < 2**64 for s in seeds):
        problems.append("seeds must be 64-bit unsigned integers")
    if mode in ("sweep-channels", "compare"):
        chans = spec_kwargs.get("channels", ExperimentSpec.channels)
        if not chans or any(int(c) < 2 for c in chans):
            problems.append("channels sweep needs values >= 2")
    if mode == "sweep-power":
        pj = spec_kwargs.get("pj_grid", ExperimentSpec.pj_grid)
        pn = spec_kwargs.get("pn_grid", ExperimentSpec.pn_grid)
        if not pj or not pn:
            problems.append("power sweep needs non-empty pj and pn grids")
        else:
            for pj_v in pj:
                for pn_v in pn:
                    v = validate_scenario(scenario.with_changes(p_jammer=float(pj_v), p_uav=float(pn_v)))
                    problems.extend(f"power cell (pj={pj_v}, pn={pn_v}): {x}" for x in v)
    if mode in ("sweep-channels", "compare"):
        for m in spec_kwargs.get("channels", ExperimentSpec.channels):
            if int(m) >= 2:
                v = validate_scenario(scenario.with_changes(n_channels=int(m)))
                problems.extend(f"channel count {m}: {x}" for x in v)
    if int(spec_kwargs.get("workers", 1)) < 1:
        problems.append("workers must be >= 1")
    if problems:
        raise ConfigError(problems)

    return ExperimentSpec(learning=LearningConfig(**merged), **spec_kwargs)


class _Shim:
    """Lets ``LearningConfig.violations`` run on a plain dict without raising."""

    def __init__(self, d):
        self.__dict__.update(d)


def load_experiment(path: str | Path) -> ExperimentSpec:
    """Read an experiment file, or a bare scenario file with default settings.

    An experiment file has an [experiment] table (``scenario`` path, ``mode``,
    ``seeds``, sweep ranges, ``out``) and an optional [learning] table.
    """
    path = Path(path)
    if not path.exists():
        try:
            path = resolve_scenario_path(path)
        except ConfigError:
            raise ConfigError("file not found", path) from None
    data = _read_toml(path)
    if "experiment" not in data:
        return build_experiment(path)
    exp = dict(data["experiment"])
    unknown = set(exp) - {
        "scenario", "mode", "seeds", "channels", "pj_grid", "pn_grid", "out", "workers", "random_draws", "oracle_cap",
    }
    if unknown:
        raise ConfigError([f"[experiment] unknown field '{k}'" for k in sorted(unknown)], path)
    if "scenario" not in exp:
        raise ConfigError("[experiment] missing field 'scenario'", path)
    try:
        return build_experiment(
            exp.pop("scenario"),
            mode=exp.pop("mode", "run"),
            learning=data.get("learning"),
            base=path.parent,
            out_dir=exp.pop("out", None),
            **exp,
        )
    except ConfigError as exc:
        raise ConfigError(exc.problems, exc.path or path) from None
