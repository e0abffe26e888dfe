import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antijam.scenario import (
    REF_FADING_A,
    REF_FADING_J,
    DegenerateGeometryError,
    FadingDistribution,
    GainSide,
    UavTrajectory,
    expected_fading,
    flight_distance,
    jammer_fc_gain,
    random_scenario,
    uav_fc_distance,
    uav_fc_gain,
    validate_scenario,
)

from .conftest import SINGLE_POINT, make_scenario


def test_distance_vertical_above_fc():
    s = make_scenario([[(100, 140), (100, 140)]])
    assert uav_fc_distance(s, 1, 1) == 100.0


def test_distance_hand_arithmetic():
    s = make_scenario([[(0, 0), (0, 0)]])
    # 100^2 + 140^2 + 100^2 = 39600
    assert uav_fc_distance(s, 1, 1) == pytest.approx(198.997487, abs=1e-6)
    assert uav_fc_distance(s, 1, 1) == pytest.approx(math.sqrt(39600), rel=1e-15)


def test_distance_index_errors():
    s = make_scenario([[(0, 0), (0, 0)]])
    with pytest.raises(IndexError):
        uav_fc_distance(s, 2, 1)
    with pytest.raises(IndexError):
        uav_fc_distance(s, 1, 2)
    with pytest.raises(IndexError):
        flight_distance(s, 0, 1)


def test_zero_distance_rejected_by_gain():
    # a ground-level UAV (altitude 0) sitting on the FC
    s = make_scenario([[(100, 140), (100, 140)]], altitudes=[0.0])
    assert uav_fc_distance(s, 1, 1) == 0.0
    with pytest.raises(DegenerateGeometryError):
        uav_fc_gain(s, 1, 1)


def test_gain_at_100m():
    s = make_scenario([[(100, 140), (100, 140)]])
    assert uav_fc_gain(s, 1, 1) == pytest.approx(1.1e-4, rel=1e-12)


def test_gain_at_unit_distance():
    s = make_scenario([[(100, 140), (100, 140)]], altitudes=[1.0])
    assert uav_fc_gain(s, 1, 1) == pytest.approx(1.1, rel=1e-15)


def test_gain_quarters_when_distance_doubles():
    near = make_scenario([[(100, 140), (100, 140)]], altitudes=[50.0])
    far = make_scenario([[(100, 140), (100, 140)]], altitudes=[100.0])
    assert uav_fc_gain(far, 1, 1) == pytest.approx(uav_fc_gain(near, 1, 1) / 4, rel=1e-14)


@given(st.floats(1.0, 1e4), st.floats(1.0, 1e4))
def test_gain_positive_and_decreasing(a, b):
    s1 = make_scenario([[(100, 140), (100, 140)]], altitudes=[min(a, b)])
    s2 = make_scenario([[(100, 140), (100, 140)]], altitudes=[max(a, b)])
    g1, g2 = uav_fc_gain(s1, 1, 1), uav_fc_gain(s2, 1, 1)
    assert g1 > 0 and g2 > 0
    if a != b:
        assert g1 > g2


def test_expected_fading_reference_vectors():
    # dot products of the published gain/probability vectors
    assert expected_fading(REF_FADING_A) == pytest.approx(1.141, abs=1e-12)
    assert expected_fading(REF_FADING_J) == pytest.approx(1.43, abs=1e-12)
    assert expected_fading(SINGLE_POINT) == 2.0


@given(st.floats(0.0, 100.0))
def test_expected_fading_linear_in_gains(c):
    scaled = FadingDistribution(tuple(c * g for g in REF_FADING_A.gains), REF_FADING_A.probs)
    assert expected_fading(scaled) == pytest.approx(c * expected_fading(REF_FADING_A), rel=1e-12, abs=1e-15)


def test_jammer_gain_reference_geometry():
    s = make_scenario([[(0, 0), (0, 0)]])
    # jammer (120, 70), FC (100, 140): d^2 = 400 + 4900 = 5300
    assert jammer_fc_gain(s, GainSide.FC_MODEL) == pytest.approx(1.43 / 5300, rel=1e-12)
    assert jammer_fc_gain(s, GainSide.FC_MODEL) == pytest.approx(2.6981e-4, abs=1e-8)
    assert jammer_fc_gain(s, GainSide.JAMMER_MODEL) == pytest.approx(2.1528e-4, abs=1e-8)


def test_jammer_gain_alpha_zero_is_fading_only():
    s = make_scenario([[(0, 0), (0, 0)]]).with_changes(alpha=0.0)
    assert jammer_fc_gain(s, GainSide.FC_MODEL) == pytest.approx(1.43)


def test_jammer_gain_degenerate():
    s = make_scenario([[(0, 0), (0, 0)]], jammer=(100.0, 140.0))
    with pytest.raises(DegenerateGeometryError):
        jammer_fc_gain(s, GainSide.JAMMER_MODEL)


def test_jammer_gain_constant_across_periods(mission):
    from antijam.game import PeriodContext

    values = {(PeriodContext(mission, z).h_a, PeriodContext(mission, z).h_j) for z in range(1, 7)}
    assert len(values) == 1


def test_flight_distance_cases():
    s = make_scenario([[(5, 5), (5, 5), (35, 45)]])
    assert flight_distance(s, 1, 1) == 0.0
    assert flight_distance(s, 1, 2) == 50.0


def test_straight_path_split_evenly():
    total = math.hypot(90.0, 120.0)
    t = UavTrajectory.straight(1, 100.0, (10.0, 20.0), (100.0, 140.0), 6)
    s = make_scenario([list(t.waypoints)])
    for z in range(1, 7):
        assert flight_distance(s, 1, z) == pytest.approx(total / 6, rel=1e-12)


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=3))
def test_flight_triangle_inequality(pts):
    s = make_scenario([pts])
    direct = math.hypot(pts[2][0] - pts[0][0], pts[2][1] - pts[0][1])
    assert flight_distance(s, 1, 1) + flight_distance(s, 1, 2) >= direct - 1e-9


def test_mission_scenario_is_valid(mission):
    assert validate_scenario(mission) == []
    assert mission.n_uavs == 6 and mission.n_periods == 6
    assert [t.altitude for t in mission.trajectories] == [100, 110, 120, 130, 140, 150]
    assert (mission.fc_pos.x, mission.fc_pos.y) == (100, 140)
    assert (mission.jammer_pos.x, mission.jammer_pos.y) == (120, 70)
    assert mission.noise_n0 == pytest.approx(1e-7)


def test_validation_flags_bad_probabilities(mission):
    bad = FadingDistribution(REF_FADING_A.gains, (0.2, 0.2, 0.2, 0.2, 0.1))
    problems = validate_scenario(mission.with_changes(fading_a=bad))
    assert any("fading probabilities" in p for p in problems)


def test_validation_flags_zero_w(mission):
    problems = validate_scenario(mission.with_changes(w_const=0.0))
    assert any("utility may be negative" in p for p in problems)


def test_validation_flags_w_below_worst_case(mission):
    problems = validate_scenario(mission.with_changes(w_const=0.5))
    assert any("utility may be negative" in p for p in problems)


def test_validation_never_raises_and_collects(mission):
    broken = mission.with_changes(n_channels=1, alpha=-1.0, p_uav=-3.0)
    problems = validate_scenario(broken)
    assert len(problems) >= 3


def test_random_scenarios_validate():
    rng = np.random.default_rng(7)
    for _ in range(20):
        s = random_scenario(rng, int(rng.integers(1, 5)), int(rng.integers(2, 5)))
        assert validate_scenario(s) == []
