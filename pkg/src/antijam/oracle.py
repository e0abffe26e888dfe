"""Exhaustive equilibrium computations for one period.

Everything here enumerates the full M**N profile space, so answers are exact
but only available for small games; past ``cap`` profiles the functions raise
rather than sample.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .game import (
    JointAction,
    PeriodContext,
    deviation_costs,
    jammer_utility,
    loss_batch,
    uav_utility,
)

DEFAULT_CAP = 10**7
CHUNK = 1 << 15
NE_TOL = 1e-9


class EnumerationTooLarge(RuntimeError):
    pass


class Selector(Enum):
    BEST_NE = "best"
    WORST_NE = "worst"


def _check_cap(ctx: PeriodContext, cap: int):
    size = ctx.n_channels**ctx.n_uavs
    if size > cap:
        raise EnumerationTooLarge(
            f"{ctx.n_channels}^{ctx.n_uavs} = {size} profiles exceeds the cap of {cap}"
        )
    return size


def profiles_from_index(idx: np.ndarray, n_uavs: int, n_channels: int) -> np.ndarray:
    """Mixed-radix decode: index 0 is (1,...,1), UAV 1 is the slowest digit."""
    powers = n_channels ** np.arange(n_uavs - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % n_channels + 1


def iter_profiles(ctx: PeriodContext, cap: int = DEFAULT_CAP):
    size = _check_cap(ctx, cap)
    for start in range(0, size, CHUNK):
        idx = np.arange(start, min(start + CHUNK, size), dtype=np.int64)
        yield idx, profiles_from_index(idx, ctx.n_uavs, ctx.n_channels)


def ne_mask(ctx: PeriodContext, profiles: np.ndarray, jammer_channel, tol: float = NE_TOL) -> np.ndarray:
    """True where no UAV can lower the total loss by moving alone."""
    costs = deviation_costs(ctx, profiles, jammer_channel)
    own = np.take_along_axis(costs, (profiles - 1)[:, :, None], axis=2)[:, :, 0]
    return np.all(own <= costs.min(axis=2) + tol, axis=1)


def is_follower_ne(ctx: PeriodContext, uav_channels, jammer_channel: int, tol: float = NE_TOL) -> bool:
    """Deviation check through the scalar utilities (independent of ``ne_mask``)."""
    action = JointAction(tuple(uav_channels), jammer_channel)
    for n in range(1, ctx.n_uavs + 1):
        base = uav_utility(ctx, action, n)
        for m in range(1, ctx.n_channels + 1):
            if m != action.uav_channels[n - 1] and uav_utility(ctx, action.deviate(n, m), n) > base + tol:
                return False
    return True


@dataclass
class Profile:
    uav_channels: tuple[int, ...]
    total_loss: float
    potential: float
    index: int


@dataclass
class NeReport:
    jammer_channel: int
    equilibria: list[Profile]
    best_ne: Profile
    worst_ne: Profile
    global_optimum: Profile
    n_profiles: int

    @property
    def optimum_is_ne(self) -> bool:
        return any(p.index == self.global_optimum.index for p in self.equilibria)


def _potential_batch(ctx: PeriodContext, profiles: np.ndarray, jammer_channel: int) -> np.ndarray:
    # pairwise + jamming + flight parts, summed separately from loss_batch
    same = profiles[:, :, None] == profiles[:, None, :]
    phi1 = (same * ctx.pair[None]).sum(axis=(1, 2))
    phi2 = ((profiles == jammer_channel) * ctx.jam_cost[None]).sum(axis=1)
    return phi1 + phi2 + ctx.flight_cost.sum()


def enumerate_follower_ne(ctx: PeriodContext, jammer_channel: int, cap: int = DEFAULT_CAP) -> NeReport:
    eq_idx, eq_prof, eq_loss = [], [], []
    best_all = (np.inf, -1, None)
    for idx, prof in iter_profiles(ctx, cap):
        loss = loss_batch(ctx, prof, jammer_channel)
        i = int(np.argmin(loss))
        if loss[i] < best_all[0]:
            best_all = (float(loss[i]), int(idx[i]), prof[i])
        mask = ne_mask(ctx, prof, jammer_channel)
        eq_idx.append(idx[mask])
        eq_prof.append(prof[mask])
        eq_loss.append(loss[mask])
    eq_idx = np.concatenate(eq_idx)
    eq_prof = np.concatenate(eq_prof)
    eq_loss = np.concatenate(eq_loss)
    eq_pot = _potential_batch(ctx, eq_prof, jammer_channel)
    equilibria = [
        Profile(tuple(int(c) for c in p), float(l), float(phi), int(i))
        for p, l, phi, i in zip(eq_prof, eq_loss, eq_pot, eq_idx)
    ]
    if not equilibria:
        # cannot happen for an exact potential game; keep the failure loud
        raise AssertionError(f"no pure NE found for jammer channel {jammer_channel}")
    # argmin/argmax return the first hit, i.e. the lowest profile index
    best = equilibria[int(np.argmin(eq_loss))]
    worst = equilibria[int(np.argmax(eq_loss))]
    opt_prof = tuple(int(c) for c in best_all[2])
    opt = Profile(
        opt_prof,
        best_all[0],
        float(_potential_batch(ctx, np.array([opt_prof]), jammer_channel)[0]),
        best_all[1],
    )
    return NeReport(jammer_channel, equilibria, best, worst, opt, ctx.n_channels**ctx.n_uavs)


def jammer_best_response(ctx: PeriodContext, uav_channels) -> int:
    a = np.asarray(uav_channels)
    per_channel = [float(ctx.jam_gain[a == c].sum()) for c in range(1, ctx.n_channels + 1)]
    return int(np.argmax(per_channel)) + 1


@dataclass
class ChannelOutcome:
    jammer_channel: int
    n_equilibria: int
    selected: Profile
    jammer_utility: float


@dataclass
class StackelbergReport:
    selector: Selector
    outcomes: list[ChannelOutcome]
    se_channel: int
    se_profile: Profile
    ne_reports: dict[int, NeReport] = field(repr=False)
    # the selected follower profile is a NE at the SE channel
    followers_stable: bool = False
    # no other commitment earns the jammer more once followers respond
    leader_optimal: bool = False
    # gain the jammer could still grab by switching with followers frozen
    fixed_profile_regret: float = 0.0

    @property
    def verified(self) -> bool:
        return self.followers_stable and self.leader_optimal


def solve_stackelberg(
    ctx: PeriodContext,
    selector: Selector = Selector.BEST_NE,
    cap: int = DEFAULT_CAP,
    reports: dict[int, NeReport] | None = None,
) -> StackelbergReport:
    """Jammer commits to the channel that pays best once the followers settle
    on the NE picked by ``selector``. Pass ``reports`` to reuse enumerations."""
    if reports is None:
        reports = {c: enumerate_follower_ne(ctx, c, cap) for c in range(1, ctx.n_channels + 1)}
    outcomes = []
    for c in range(1, ctx.n_channels + 1):
        rep = reports[c]
        chosen = rep.best_ne if selector is Selector.BEST_NE else rep.worst_ne
        u_j = jammer_utility(ctx, JointAction(chosen.uav_channels, c))
        outcomes.append(ChannelOutcome(c, len(rep.equilibria), chosen, u_j))
    utilities = np.array([o.jammer_utility for o in outcomes])
    star = int(np.argmax(utilities))
    se = outcomes[star]

    followers_stable = is_follower_ne(ctx, se.selected.uav_channels, se.jammer_channel)
    leader_optimal = all(se.jammer_utility >= o.jammer_utility for o in outcomes)
    frozen = [
        jammer_utility(ctx, JointAction(se.selected.uav_channels, c)) for c in range(1, ctx.n_channels + 1)
    ]
    return StackelbergReport(
        selector=selector,
        outcomes=outcomes,
        se_channel=se.jammer_channel,
        se_profile=se.selected,
        ne_reports=reports,
        followers_stable=followers_stable,
        leader_optimal=leader_optimal,
        fixed_profile_regret=float(max(frozen) - se.jammer_utility),
    )


def random_policy(ctx: PeriodContext, rng: np.random.Generator) -> JointAction:
    draws = rng.integers(1, ctx.n_channels + 1, size=ctx.n_uavs + 1)
    return JointAction(tuple(int(c) for c in draws[:-1]), int(draws[-1]))


def random_baseline_loss(ctx: PeriodContext, rng: np.random.Generator, draws: int = 10_000) -> float:
    """Mean total loss of uniformly random play by every UAV and the jammer."""
    sample = rng.integers(1, ctx.n_channels + 1, size=(draws, ctx.n_uavs + 1))
    return float(loss_batch(ctx, sample[:, :-1], sample[:, -1]).mean())


def selfish_costs(ctx: PeriodContext, uav_channels: np.ndarray, jammer_channel: int) -> np.ndarray:
    """(N, M) own loss of UAV n on channel m, others fixed, flight excluded."""
    m_range = np.arange(1, ctx.n_channels + 1)
    onehot = (np.asarray(uav_channels)[:, None] == m_range[None, :]).astype(float)
    return ctx.pair @ onehot + ctx.jam_cost[:, None] * (m_range == jammer_channel)[None, :]


def is_selfish_ne(ctx: PeriodContext, uav_channels, jammer_channel: int, tol: float = NE_TOL) -> bool:
    a = np.asarray(uav_channels)
    costs = selfish_costs(ctx, a, jammer_channel)
    own = costs[np.arange(ctx.n_uavs), a - 1]
    return bool(np.all(own <= costs.min(axis=1) + tol))


@dataclass
class NoncooperativeResult:
    uav_channels: tuple[int, ...]
    jammer_channel: int
    total_loss: float
    converged: bool
    sweeps: int


def noncooperative_reference(
    ctx: PeriodContext, jammer_channel: int, rng: np.random.Generator, max_sweeps: int = 200
) -> NoncooperativeResult:
    """Round-robin best response of UAVs that only count their own loss.

    Selfish play is not known to admit a potential, so cycling is possible;
    it is reported through ``converged`` rather than raised.
    """
    a = rng.integers(1, ctx.n_channels + 1, size=ctx.n_uavs)
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        moved = False
        for n in range(ctx.n_uavs):
            costs = selfish_costs(ctx, a, jammer_channel)[n]
            if costs[a[n] - 1] > costs.min() + NE_TOL:
                a[n] = int(np.argmin(costs)) + 1
                moved = True
        if not moved:
            converged = True
            break
    loss = float(loss_batch(ctx, a[None, :], jammer_channel)[0])
    return NoncooperativeResult(tuple(int(c) for c in a), jammer_channel, loss, converged, sweeps)
