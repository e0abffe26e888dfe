import sys

import numpy as np
import pytest

from antijam.config import load_scenario
from antijam.game import PeriodContext
from antijam.scenario import (
    REF_FADING_A,
    REF_FADING_J,
    FadingDistribution,
    Position3,
    Scenario,
    UavTrajectory,
)


def make_scenario(
    paths,
    altitudes=None,
    n_channels=2,
    p_uav=10.0,
    p_jammer=30.0,
    jammer=(120.0, 70.0),
    fc=(100.0, 140.0),
    c_f=1.0,
    c_0=1e-3,
    w_const=1.0,
    alpha=2.0,
    gain_scale=1.1,
    fading_a=REF_FADING_A,
    fading_j=REF_FADING_J,
):
    """Hand-built scenario; ``paths`` holds one waypoint list per UAV."""
    n = len(paths)
    altitudes = altitudes or [100.0] * n
    powers = tuple(p_uav) if np.ndim(p_uav) else (float(p_uav),) * n
    trajs = tuple(
        UavTrajectory(i + 1, float(altitudes[i]), tuple(tuple(map(float, w)) for w in paths[i]))
        for i in range(n)
    )
    return Scenario(
        n_uavs=n,
        n_channels=n_channels,
        n_periods=len(paths[0]) - 1,
        trajectories=trajs,
        jammer_pos=Position3(*jammer),
        fc_pos=Position3(*fc),
        p_uav=powers,
        p_jammer=p_jammer,
        noise_n0_db=-70.0,
        alpha=alpha,
        gain_scale=gain_scale,
        c_f=c_f,
        c_0=c_0,
        w_const=w_const,
        fading_a=fading_a,
        fading_j=fading_j,
        name="hand",
    )


@pytest.fixture(scope="session")
def mission():
    return load_scenario("reference_mission")


@pytest.fixture
def solo_ctx():
    """One UAV hovering above the FC, two channels, no flight cost."""
    s = make_scenario([[(100.0, 140.0), (100.0, 140.0)]], c_f=0.0)
    return PeriodContext(s, 1)


SINGLE_POINT = FadingDistribution((2.0,), (1.0,))


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, repeated after the test log
    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
