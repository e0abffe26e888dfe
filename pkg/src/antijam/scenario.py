"""World description and channel-gain model.

Geometry is fixed per scenario: UAVs fly piecewise-straight paths at a
constant altitude, the jammer and the fusion center (FC) sit on the ground.
All gains are expected (not sampled) values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class DegenerateGeometryError(ValueError):
    """Raised when a link distance is zero and the power-law gain blows up."""


@dataclass(frozen=True)
class Position3:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self}")


@dataclass(frozen=True)
class UavTrajectory:
    uav_id: int
    altitude: float
    # (Z+1) horizontal positions: the start followed by one endpoint per period
    waypoints: tuple[tuple[float, float], ...]

    @classmethod
    def straight(cls, uav_id, altitude, start, destination, n_periods):
        """Straight start-to-destination path cut into equal periods."""
        sx, sy = start
        dx, dy = destination
        pts = tuple(
            (sx + (dx - sx) * z / n_periods, sy + (dy - sy) * z / n_periods)
            for z in range(n_periods + 1)
        )
        return cls(uav_id, float(altitude), pts)

    @property
    def n_periods(self) -> int:
        return len(self.waypoints) - 1


@dataclass(frozen=True)
class FadingDistribution:
    gains: tuple[float, ...]
    probs: tuple[float, ...]


def expected_fading(dist: FadingDistribution) -> float:
    return float(np.dot(dist.gains, dist.probs))


class GainSide(Enum):
    JAMMER_MODEL = "jammer"  # what the jammer believes (H_a)
    FC_MODEL = "fc"  # what the FC/UAV side believes (H_j)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class Scenario:
    n_uavs: int
    n_channels: int
    n_periods: int
    trajectories: tuple[UavTrajectory, ...]
    jammer_pos: Position3
    fc_pos: Position3
    p_uav: tuple[float, ...]
    p_jammer: float
    noise_n0_db: float
    alpha: float
    gain_scale: float
    c_f: float
    c_0: float
    w_const: float
    fading_a: FadingDistribution
    fading_j: FadingDistribution
    d0: float = 50.0  # carried for provenance, no formula uses it
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def noise_n0(self) -> float:
        """Noise power in linear units."""
        return db_to_linear(self.noise_n0_db)

    def with_changes(self, **kw) -> "Scenario":
        """Copy with some fields replaced (``p_uav`` may be a scalar)."""
        from dataclasses import replace

        if "p_uav" in kw and np.isscalar(kw["p_uav"]):
            kw["p_uav"] = (float(kw["p_uav"]),) * self.n_uavs
        return replace(self, **kw)


def _check_indices(scenario: Scenario, uav_id: int, period: int):
    if not 1 <= uav_id <= scenario.n_uavs:
        raise IndexError(f"uav_id {uav_id} outside 1..{scenario.n_uavs}")
    if not 1 <= period <= scenario.n_periods:
        raise IndexError(f"period {period} outside 1..{scenario.n_periods}")


def uav_fc_distance(scenario: Scenario, uav_id: int, period: int) -> float:
    """3D distance from the UAV's period-end waypoint to the FC."""
    _check_indices(scenario, uav_id, period)
    traj = scenario.trajectories[uav_id - 1]
    x, y = traj.waypoints[period]
    fc = scenario.fc_pos
    return math.sqrt((x - fc.x) ** 2 + (y - fc.y) ** 2 + (traj.altitude - fc.z) ** 2)


def uav_fc_gain(scenario: Scenario, uav_id: int, period: int) -> float:
    d = uav_fc_distance(scenario, uav_id, period)
    if d == 0.0:
        raise DegenerateGeometryError(f"UAV {uav_id} sits on the FC in period {period}")
    return scenario.gain_scale * d ** (-scenario.alpha)


def jammer_fc_distance(scenario: Scenario) -> float:
    # horizontal only, both nodes are on the ground
    j, fc = scenario.jammer_pos, scenario.fc_pos
    return math.hypot(fc.x - j.x, fc.y - j.y)


def jammer_fc_gain(scenario: Scenario, side: GainSide) -> float:
    d = jammer_fc_distance(scenario)
    if d == 0.0:
        raise DegenerateGeometryError("jammer and FC share a position")
    fading = scenario.fading_a if side is GainSide.JAMMER_MODEL else scenario.fading_j
    return expected_fading(fading) * d ** (-scenario.alpha)


def flight_distance(scenario: Scenario, uav_id: int, period: int) -> float:
    _check_indices(scenario, uav_id, period)
    wp = scenario.trajectories[uav_id - 1].waypoints
    (x0, y0), (x1, y1) = wp[period - 1], wp[period]
    return math.hypot(x1 - x0, y1 - y0)


def worst_case_loss(scenario: Scenario, period: int) -> float:
    """Largest total loss any joint action can reach in ``period``.

    Every loss term is nonnegative and switched on by an equality indicator,
    so the maximum is attained when all UAVs and the jammer share a channel.
    """
    n = scenario.n_uavs
    p = np.asarray(scenario.p_uav, dtype=float)
    h = np.array([uav_fc_gain(scenario, i, period) for i in range(1, n + 1)])
    flight = sum(flight_distance(scenario, i, period) for i in range(1, n + 1))
    pair = np.outer(p, p * h)
    np.fill_diagonal(pair, 0.0)
    jam = p.sum() * scenario.p_jammer * jammer_fc_gain(scenario, GainSide.FC_MODEL)
    return float(pair.sum() + jam + scenario.c_f * scenario.c_0 * flight)


def validate_scenario(scenario: Scenario) -> list[str]:
    """Return every invariant violation found; an empty list means valid."""
    s = scenario
    out: list[str] = []
    if s.n_uavs < 1:
        out.append("n_uavs must be >= 1")
    if s.n_channels < 2:
        out.append("n_channels must be >= 2")
    if s.n_periods < 1:
        out.append("n_periods must be >= 1")
    if len(s.trajectories) != s.n_uavs:
        out.append(f"expected {s.n_uavs} trajectories, got {len(s.trajectories)}")
    for t in s.trajectories:
        if t.altitude <= 0:
            out.append(f"UAV {t.uav_id}: altitude must be > 0")
        if len(t.waypoints) != s.n_periods + 1:
            out.append(
                f"UAV {t.uav_id}: {len(t.waypoints)} waypoints, expected {s.n_periods + 1}"
            )
        if not all(math.isfinite(c) for wp in t.waypoints for c in wp):
            out.append(f"UAV {t.uav_id}: non-finite waypoint")
    if len(s.p_uav) != s.n_uavs:
        out.append(f"expected {s.n_uavs} UAV powers, got {len(s.p_uav)}")
    if any(not p > 0 for p in s.p_uav):
        out.append("UAV powers must be > 0")
    if not s.p_jammer >= 0:
        out.append("jammer power must be >= 0")
    if not s.alpha > 0:
        out.append("alpha must be > 0")
    if not s.gain_scale > 0:
        out.append("gain_scale must be > 0")
    if s.c_f < 0 or s.c_0 < 0:
        out.append("flight cost factors must be >= 0")
    if not s.w_const > 0:
        out.append("utility may be negative: w_const must be > 0")
    for label, fd in (("fading_a", s.fading_a), ("fading_j", s.fading_j)):
        if len(fd.gains) != len(fd.probs) or not fd.gains:
            out.append(f"{label}: fading probabilities and gains differ in length")
        elif any(p < 0 for p in fd.probs) or abs(sum(fd.probs) - 1.0) > 1e-12:
            out.append(f"{label}: fading probabilities must be >= 0 and sum to 1")
        elif any(g < 0 for g in fd.gains):
            out.append(f"{label}: fading gains must be >= 0")
    if jammer_fc_distance(s) == 0.0:
        out.append("degenerate geometry: jammer and FC coincide")
    if out:
        return out

    for z in range(1, s.n_periods + 1):
        try:
            worst = worst_case_loss(s, z)
        except DegenerateGeometryError as exc:
            out.append(f"degenerate geometry: {exc}")
            break
        if worst >= s.w_const:
            out.append(
                f"utility may be negative: worst-case loss {worst:.6g} in period {z} "
                f">= w_const {s.w_const:.6g}"
            )
            break
    return out


# Table 3 constants
REF_FADING_A = FadingDistribution((0.5, 0.8, 1.0, 1.5, 2.0), (0.21, 0.22, 0.14, 0.28, 0.15))
REF_FADING_J = FadingDistribution((0.5, 1.0, 1.5, 2.0, 2.5), (0.14, 0.28, 0.28, 0.18, 0.12))
REF_CONSTANTS = dict(
    noise_n0_db=-70.0,
    alpha=2.0,
    gain_scale=1.1,
    c_f=1.0,
    c_0=1e-3,
    w_const=1.0,
    d0=50.0,
)


def random_scenario(
    rng: np.random.Generator,
    n_uavs: int,
    n_channels: int,
    n_periods: int = 1,
    p_uav: float = 10.0,
    p_jammer: float = 30.0,
) -> Scenario:
    """Random geometry in a 200 m x 100 m area with the reference constants.

    Draws are repeated until the scenario validates, so W = 1 always keeps
    utilities nonnegative.
    """
    while True:
        trajs = []
        for i in range(n_uavs):
            start = rng.uniform((0.0, 0.0), (200.0, 100.0))
            # up to ~40 m of travel per period
            dest = start + rng.uniform(-30.0, 30.0, size=2) * n_periods
            alt = rng.uniform(100.0, 150.0)
            trajs.append(UavTrajectory.straight(i + 1, alt, tuple(start), tuple(dest), n_periods))
        fc = rng.uniform((0.0, 100.0), (200.0, 150.0))
        jam = rng.uniform((0.0, 0.0), (200.0, 100.0))
        s = Scenario(
            n_uavs=n_uavs,
            n_channels=n_channels,
            n_periods=n_periods,
            trajectories=tuple(trajs),
            jammer_pos=Position3(float(jam[0]), float(jam[1])),
            fc_pos=Position3(float(fc[0]), float(fc[1])),
            p_uav=(p_uav,) * n_uavs,
            p_jammer=p_jammer,
            fading_a=REF_FADING_A,
            fading_j=REF_FADING_J,
            name="random",
            **REF_CONSTANTS,
        )
        if not validate_scenario(s):
            return s
