"""Per-period game quantities: interference, loss, utilities, potential.

Channels and UAV ids are 1-based throughout, as in the model. The scalar
functions follow the loss definitions term by term; ``loss_batch`` and
``deviation_costs`` are vectorized equivalents used by the learners and the
equilibrium oracle, and are cross-checked against the scalar path in tests.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import (
    GainSide,
    Scenario,
    flight_distance,
    jammer_fc_gain,
    uav_fc_gain,
)


class NegativeUtilityError(ValueError):
    """w_const is too small for the loss reached by some joint action."""


@dataclass(frozen=True)
class JointAction:
    uav_channels: tuple[int, ...]
    jammer_channel: int

    def __post_init__(self):
        object.__setattr__(self, "uav_channels", tuple(int(c) for c in self.uav_channels))
        object.__setattr__(self, "jammer_channel", int(self.jammer_channel))

    def validate(self, n_uavs: int, n_channels: int):
        if len(self.uav_channels) != n_uavs:
            raise ValueError(f"expected {n_uavs} UAV channels, got {len(self.uav_channels)}")
        for c in (*self.uav_channels, self.jammer_channel):
            if not 1 <= c <= n_channels:
                raise ValueError(f"channel {c} outside 1..{n_channels}")

    def deviate(self, uav_id: int, channel: int) -> "JointAction":
        ch = list(self.uav_channels)
        ch[uav_id - 1] = channel
        return JointAction(tuple(ch), self.jammer_channel)


class PeriodContext:
    """Gains and flight distances of one period, computed once."""

    def __init__(self, scenario: Scenario, period: int):
        self.scenario = scenario
        self.period = period
        n = scenario.n_uavs
        self.n_uavs = n
        self.n_channels = scenario.n_channels
        self.p = np.asarray(scenario.p_uav, dtype=float)
        self.p_j = float(scenario.p_jammer)
        self.h = np.array([uav_fc_gain(scenario, i, period) for i in range(1, n + 1)])
        self.flight = np.array([flight_distance(scenario, i, period) for i in range(1, n + 1)])
        self.h_a = jammer_fc_gain(scenario, GainSide.JAMMER_MODEL)
        self.h_j = jammer_fc_gain(scenario, GainSide.FC_MODEL)
        self.w_const = scenario.w_const
        self.noise = scenario.noise_n0

        # pair[n, k] = p_n p_k H_k, the weight of "n shares a channel with k"
        self.pair = np.outer(self.p, self.p * self.h)
        np.fill_diagonal(self.pair, 0.0)
        self.pair_sym = self.pair + self.pair.T
        self.jam_cost = self.p * self.p_j * self.h_j
        self.jam_gain = self.p * self.p_j * self.h_a
        self.flight_cost = scenario.c_f * scenario.c_0 * self.flight
        self.flight_total = float(self.flight_cost.sum())

    def __repr__(self):
        return f"PeriodContext({self.scenario.name!r}, period={self.period})"


def indicator(x: int, y: int) -> int:
    return 1 if x == y else 0


def mutual_interference(ctx: PeriodContext, action: JointAction, uav_id: int) -> float:
    """Received co-channel power from the other UAVs, as it enters the SINR."""
    a = action.uav_channels
    n = uav_id - 1
    return float(
        sum(ctx.p[k] * ctx.h[k] * indicator(a[n], a[k]) for k in range(ctx.n_uavs) if k != n)
    )


def malicious_interference(ctx: PeriodContext, action: JointAction, uav_id: int) -> float:
    return ctx.p_j * ctx.h_j * indicator(action.uav_channels[uav_id - 1], action.jammer_channel)


def sinr(ctx: PeriodContext, action: JointAction, uav_id: int) -> float:
    n = uav_id - 1
    signal = ctx.p[n] * ctx.h[n]
    return float(
        signal
        / (ctx.noise + mutual_interference(ctx, action, uav_id) + malicious_interference(ctx, action, uav_id))
    )


def uav_loss(ctx: PeriodContext, action: JointAction, uav_id: int) -> float:
    a = action.uav_channels
    n = uav_id - 1
    p_n = ctx.p[n]
    jam = p_n * ctx.p_j * ctx.h_j * indicator(a[n], action.jammer_channel)
    mutual = sum(
        p_n * ctx.p[k] * ctx.h[k] * indicator(a[n], a[k]) for k in range(ctx.n_uavs) if k != n
    )
    return float(jam + mutual + ctx.flight_cost[n])


def total_loss(ctx: PeriodContext, action: JointAction) -> float:
    return float(sum(uav_loss(ctx, action, i) for i in range(1, ctx.n_uavs + 1)))


def uav_utility(ctx: PeriodContext, action: JointAction, uav_id: int) -> float:
    """Locally altruistic utility: W minus the loss of every UAV, own included.

    Because every UAV counts all losses, the value does not depend on
    ``uav_id`` for a fixed joint action.
    """
    if not 1 <= uav_id <= ctx.n_uavs:
        raise IndexError(f"uav_id {uav_id} outside 1..{ctx.n_uavs}")
    own = uav_loss(ctx, action, uav_id)
    others = sum(uav_loss(ctx, action, k) for k in range(1, ctx.n_uavs + 1) if k != uav_id)
    u = ctx.w_const - (own + others)
    if u < 0:
        raise NegativeUtilityError(f"utility {u:.6g} < 0; raise w_const")
    return u


def jammer_utility(ctx: PeriodContext, action: JointAction) -> float:
    c = action.jammer_channel
    return float(
        sum(ctx.p[n] * ctx.p_j * ctx.h_a * indicator(a, c) for n, a in enumerate(action.uav_channels))
    )


def jammer_utility_bound(ctx: PeriodContext) -> float:
    """Jammer utility when every UAV sits on the jammed channel."""
    return float(ctx.jam_gain.sum())


def potential(ctx: PeriodContext, action: JointAction) -> float:
    """Potential of the follower subgame: pairwise, jamming and flight parts.

    Oriented like a loss. A unilateral move lowers it by exactly the amount
    the mover's utility rises.
    """
    a = action.uav_channels
    c = action.jammer_channel
    n_uavs = ctx.n_uavs
    phi1 = 0.0
    for n in range(n_uavs):
        for k in range(n_uavs):
            if k != n:
                phi1 += ctx.p[n] * ctx.p[k] * ctx.h[k] * indicator(a[n], a[k])
    phi2 = 0.0
    for n in range(n_uavs):
        phi2 += ctx.p[n] * ctx.p_j * ctx.h_j * indicator(a[n], c)
    phi3 = float(np.sum(ctx.scenario.c_f * ctx.scenario.c_0 * ctx.flight))
    return float(phi1 + phi2 + phi3)


def deviation_delta(
    ctx: PeriodContext, action: JointAction, uav_id: int, new_channel: int
) -> tuple[float, float]:
    """Utility gain of UAV ``uav_id`` moving to ``new_channel``, and the
    matching drop in potential. The two are equal in an exact potential game.
    """
    moved = action.deviate(uav_id, new_channel)
    d_u = uav_utility(ctx, moved, uav_id) - uav_utility(ctx, action, uav_id)
    d_phi = potential(ctx, action) - potential(ctx, moved)
    return d_u, d_phi


# --- vectorized paths -------------------------------------------------------


def loss_batch(ctx: PeriodContext, profiles: np.ndarray, jammer_channel) -> np.ndarray:
    """Total loss of many UAV profiles at once.

    ``profiles`` has shape (P, N); ``jammer_channel`` is a scalar or a (P,)
    array. Returns shape (P,).
    """
    prof = np.atleast_2d(profiles)
    same = prof[:, :, None] == prof[:, None, :]
    mutual = np.einsum("pnk,nk->p", same, ctx.pair)
    jc = np.asarray(jammer_channel)
    if jc.ndim == 1:
        jc = jc[:, None]
    jam = (prof == jc) @ ctx.jam_cost
    return mutual + jam + ctx.flight_total


def loss_of(ctx: PeriodContext, uav_channels: np.ndarray, jammer_channel: int) -> float:
    """Total loss of a single profile given as an integer array (fast path)."""
    same = uav_channels[:, None] == uav_channels[None, :]
    return float(
        (ctx.pair * same).sum()
        + ctx.jam_cost[uav_channels == jammer_channel].sum()
        + ctx.flight_total
    )


def jammer_gain_of(ctx: PeriodContext, uav_channels: np.ndarray, jammer_channel: int) -> float:
    return float(ctx.jam_gain[uav_channels == jammer_channel].sum())


def deviation_costs(ctx: PeriodContext, profiles: np.ndarray, jammer_channel) -> np.ndarray:
    """Action-dependent part of the total loss seen by each UAV per channel.

    Returns shape (P, N, M): entry [p, n, m-1] is the total loss of profile p
    with UAV n moved to channel m, minus the terms that do not involve UAV n.
    Comparing entries across m ranks UAV n's unilateral options exactly.
    """
    prof = np.atleast_2d(profiles)
    m_range = np.arange(1, ctx.n_channels + 1)
    # onehot[p, k, m] = 1 if UAV k is on channel m
    onehot = (prof[:, :, None] == m_range[None, None, :]).astype(float)
    # co-channel weight UAV n would face on channel m, from both directions
    shared = np.einsum("nk,pkm->pnm", ctx.pair_sym, onehot)
    jc = np.asarray(jammer_channel)
    if jc.ndim == 0:
        jam_on = (m_range == jc)[None, None, :]
    else:
        jam_on = (m_range[None, :] == jc[:, None])[:, None, :]
    return shared + ctx.jam_cost[None, :, None] * jam_on
