"""Stochastic learning automata for the jammer (leader) and the UAVs.

One period runs nested loops: in each jammer epoch the UAVs learn slot by
slot against the jammer's drawn channel until their strategies settle, then
the jammer draws again, scores that draw against the UAVs' settled channels,
and reinforces it.

Random streams: every learner owns a PCG64 generator seeded from
``SeedSequence(seed, spawn_key=(period, learner))`` with learner 0 for the
jammer and learner n for UAV n. Streams are therefore independent of how
many UAVs or periods exist and of the order in which periods are run.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .game import NegativeUtilityError, PeriodContext, jammer_gain_of, jammer_utility_bound, loss_of
from .scenario import Scenario

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class LearningConfig:
    b1: float = 0.2
    b2: float = 0.3
    q_threshold: float = 0.999
    inner_q_threshold: float = 0.999
    max_epochs: int = 500
    max_slots: int = 300
    seed: int = 0
    reset_per_epoch: bool = False
    # False reuses the epoch's first jammer draw for the jammer's own update
    jammer_redraw: bool = True

    def __post_init__(self):
        errs = self.violations()
        if errs:
            raise ValueError("; ".join(errs))

    def violations(self) -> list[str]:
        out = []
        if not 0 < self.b1 < 1:
            out.append(f"b1={self.b1} must lie in (0, 1)")
        if not 0 < self.b2 < 1:
            out.append(f"b2={self.b2} must lie in (0, 1)")
        for name in ("q_threshold", "inner_q_threshold"):
            v = getattr(self, name)
            if not 0.5 < v <= 1:
                out.append(f"{name}={v} must lie in (0.5, 1]")
        if self.max_epochs < 1:
            out.append(f"max_epochs={self.max_epochs} must be >= 1")
        if self.max_slots < 1:
            out.append(f"max_slots={self.max_slots} must be >= 1")
        if not 0 <= self.seed < 2**64:
            out.append(f"seed={self.seed} must be a 64-bit unsigned integer")
        return out

    def as_dict(self) -> dict:
        return asdict(self)


def learner_rng(seed: int, period: int, learner: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(period, learner))
    return np.random.Generator(np.random.PCG64(ss))


def uniform_strategy(n_channels: int) -> np.ndarray:
    return np.full(n_channels, 1.0 / n_channels)


def is_valid_strategy(probs: np.ndarray, tol: float = SIMPLEX_TOL) -> bool:
    probs = np.asarray(probs)
    return bool(np.all(probs >= 0) and np.all(probs <= 1) and abs(probs.sum() - 1.0) <= tol)


def sample_channel(strategy: np.ndarray, rng: np.random.Generator) -> int:
    """Draw a 1-based channel from ``strategy`` using exactly one uniform."""
    u = rng.random()
    cdf = np.cumsum(strategy)
    idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    if idx >= len(strategy) or strategy[idx] == 0.0:
        # u landed on a rounding sliver past the last mass point
        idx = int(np.flatnonzero(strategy)[-1])
    return idx + 1


def normalize_utility(raw_utility: float, bound: float) -> float:
    """Map a utility in [0, bound] onto [0, 1].

    UAVs pass ``w_const`` as the bound, the jammer its all-UAVs-hit maximum.
    A zero bound (silent jammer) maps everything to 0.
    """
    if raw_utility < 0 or raw_utility > bound * (1 + 1e-12):
        raise ValueError(f"utility {raw_utility!r} outside [0, {bound!r}]")
    if bound == 0:
        return 0.0
    return min(raw_utility / bound, 1.0)


def sla_update(strategy: np.ndarray, chosen: int, normalized_utility: float, step_size: float) -> np.ndarray:
    """Reinforce ``chosen`` (1-based) in proportion to the normalized payoff."""
    if not 0 <= normalized_utility <= 1:
        raise ValueError(f"normalized utility {normalized_utility} outside [0, 1]")
    r = step_size * normalized_utility
    out = strategy * (1.0 - r)
    out[chosen - 1] += r
    assert abs(out.sum() - 1.0) <= SIMPLEX_TOL, out
    return out


@dataclass
class UavPhase:
    strategies: np.ndarray  # (N, M)
    channels: np.ndarray  # (N,) argmax, 1-based
    slots_used: int
    converged: bool
    trace: np.ndarray  # (slots_used, N, M), strategies after each slot
    utility: np.ndarray  # (slots_used,) common UAV utility per slot
    loss: np.ndarray  # (slots_used,) total loss per slot


def argmax_channels(strategies: np.ndarray) -> np.ndarray:
    # np.argmax keeps the first maximum: lowest channel wins ties
    return np.argmax(strategies, axis=-1) + 1


def run_uav_phase(
    ctx: PeriodContext,
    jammer_channel: int,
    strategies: np.ndarray,
    config: LearningConfig,
    rngs: list[np.random.Generator],
) -> UavPhase:
    theta = np.array(strategies, dtype=float, copy=True)
    n = ctx.n_uavs
    rows = np.arange(n)
    w = ctx.w_const
    b1 = config.b1
    trace, util, losses = [], [], []
    chosen = np.empty(n, dtype=np.int64)
    converged = bool(np.all(theta.max(axis=1) > config.inner_q_threshold))
    slots = 0
    while not converged and slots < config.max_slots:
        for i in range(n):
            chosen[i] = sample_channel(theta[i], rngs[i])
        total = loss_of(ctx, chosen, jammer_channel)
        # every UAV's altruistic utility is W minus the same total loss
        u = w - total
        if u < 0:
            raise NegativeUtilityError(f"utility {u:.6g} < 0; raise w_const")
        r = b1 * normalize_utility(u, w)
        theta *= 1.0 - r
        theta[rows, chosen - 1] += r
        slots += 1
        trace.append(theta.copy())
        util.append(u)
        losses.append(total)
        converged = bool(np.all(theta.max(axis=1) > config.inner_q_threshold))
    sums = theta.sum(axis=1)
    assert np.all(np.abs(sums - 1.0) <= SIMPLEX_TOL), sums
    m = ctx.n_channels
    return UavPhase(
        strategies=theta,
        channels=argmax_channels(theta),
        slots_used=slots,
        converged=converged,
        trace=np.array(trace).reshape(slots, n, m),
        utility=np.array(util),
        loss=np.array(losses),
    )


@dataclass
class PeriodResult:
    period: int
    uav_channels: tuple[int, ...]
    jammer_channel: int
    total_loss: float
    jammer_utility: float
    epochs_used: int
    slots_used: int
    phase_slots: list[int]
    phase_converged: list[bool]
    jammer_converged: bool
    uav_converged: bool
    jammer_trace: np.ndarray  # (epochs_used + 1, M), initial row first
    uav_trace: np.ndarray  # (slots_used + 1, N, M), initial row first
    slot_epoch: np.ndarray  # (slots_used,) epoch index of each slot
    slot_utility: np.ndarray
    slot_loss: np.ndarray
    epoch_jammer_utility: np.ndarray  # (epochs_used,)
    epoch_loss: np.ndarray  # (epochs_used,) loss of settled UAVs vs the learning draw


@dataclass
class RunResult:
    seed: int
    config: LearningConfig
    periods: list[PeriodResult] = field(default_factory=list)

    @property
    def total_loss(self) -> float:
        """Mission loss: per-period total losses summed over periods."""
        return float(sum(p.total_loss for p in self.periods))

    @property
    def jammer_channels(self) -> tuple[int, ...]:
        return tuple(p.jammer_channel for p in self.periods)

    @property
    def uav_channels(self) -> tuple[tuple[int, ...], ...]:
        return tuple(p.uav_channels for p in self.periods)

    @property
    def epochs_used(self) -> int:
        return sum(p.epochs_used for p in self.periods)

    @property
    def slots_used(self) -> int:
        return sum(p.slots_used for p in self.periods)

    @property
    def converged(self) -> bool:
        return all(p.jammer_converged and p.uav_converged for p in self.periods)


class LearnerStreams:
    def __init__(self, seed: int, period: int, n_uavs: int):
        self.jammer = learner_rng(seed, period, 0)
        self.uavs = [learner_rng(seed, period, n) for n in range(1, n_uavs + 1)]


def run_period(ctx: PeriodContext, config: LearningConfig, streams: LearnerStreams | None = None) -> PeriodResult:
    if streams is None:
        streams = LearnerStreams(config.seed, ctx.period, ctx.n_uavs)
    m, n = ctx.n_channels, ctx.n_uavs
    bound = jammer_utility_bound(ctx)
    theta_j = uniform_strategy(m)
    theta_u = np.tile(uniform_strategy(m), (n, 1))

    j_trace = [theta_j.copy()]
    u_trace = [theta_u.copy()]
    slot_epoch, slot_util, slot_loss = [], [], []
    epoch_util, epoch_loss = [], []
    phase_slots, phase_conv = [], []
    uav_channels = argmax_channels(theta_u)
    uav_conv = False
    jam_conv = bool(theta_j.max() > config.q_threshold)
    epochs = 0
    while not jam_conv and epochs < config.max_epochs:
        experienced = sample_channel(theta_j, streams.jammer)
        if config.reset_per_epoch:
            theta_u = np.tile(uniform_strategy(m), (n, 1))
        phase = run_uav_phase(ctx, experienced, theta_u, config, streams.uavs)
        theta_u = phase.strategies
        uav_channels = phase.channels
        uav_conv = phase.converged
        if phase.slots_used:
            phase_slots.append(phase.slots_used)
            phase_conv.append(phase.converged)
            u_trace.extend(phase.trace)
            slot_epoch.extend([epochs] * phase.slots_used)
            slot_util.extend(phase.utility)
            slot_loss.extend(phase.loss)

        learned = sample_channel(theta_j, streams.jammer) if config.jammer_redraw else experienced
        u_j = jammer_gain_of(ctx, uav_channels, learned)
        theta_j = sla_update(theta_j, learned, normalize_utility(u_j, bound), config.b2)
        j_trace.append(theta_j.copy())
        epoch_util.append(u_j)
        epoch_loss.append(loss_of(ctx, uav_channels, learned))
        epochs += 1
        jam_conv = bool(theta_j.max() > config.q_threshold)

    jammer_channel = int(np.argmax(theta_j)) + 1
    final = np.asarray(uav_channels)
    return PeriodResult(
        period=ctx.period,
        uav_channels=tuple(int(c) for c in final),
        jammer_channel=jammer_channel,
        total_loss=loss_of(ctx, final, jammer_channel),
        jammer_utility=jammer_gain_of(ctx, final, jammer_channel),
        epochs_used=epochs,
        slots_used=len(slot_loss),
        phase_slots=phase_slots,
        phase_converged=phase_conv,
        jammer_converged=jam_conv,
        uav_converged=uav_conv,
        jammer_trace=np.array(j_trace),
        uav_trace=np.array(u_trace),
        slot_epoch=np.array(slot_epoch, dtype=np.int64),
        slot_utility=np.array(slot_util),
        slot_loss=np.array(slot_loss),
        epoch_jammer_utility=np.array(epoch_util),
        epoch_loss=np.array(epoch_loss),
    )


def run_all_periods(scenario: Scenario, config: LearningConfig) -> RunResult:
    from .scenario import validate_scenario

    problems = validate_scenario(scenario)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))
    result = RunResult(seed=config.seed, config=config)
    for z in range(1, scenario.n_periods + 1):
        result.periods.append(run_period(PeriodContext(scenario, z), config))
    return result
