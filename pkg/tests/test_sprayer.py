"""Turret kinematics, the spread curve, and spray plan execution."""

import math

import numpy as np
import pytest

from sparrow import (DomainError, GroundPoint, OutOfReachError, SprayerConfig,
                     aim_angles, execute_plan, ground_point_of_angles,
                     plan_nearest_neighbor, spread_radius)

CFG = SprayerConfig()  # height 70, mount at footprint center (0, 25.5)


# --- aim angles --------------------------------------------------------------

def test_tilt_is_90_under_nozzle():
    angles = aim_angles(CFG.mount_point, CFG)
    assert angles.tilt == 90.0


def test_tilt_135_at_r1_equal_height():
    target = GroundPoint(CFG.mount_point.x + 70.0, CFG.mount_point.y)
    angles = aim_angles(target, CFG)
    assert angles.tilt == pytest.approx(135.0, abs=1e-9)


def test_tilt_at_max_reach_matches_hand_arctangent():
    target = GroundPoint(CFG.mount_point.x, CFG.mount_point.y + 161.0)
    angles = aim_angles(target, CFG)
    # independent hand evaluation: 90 + atan(161/70) in degrees
    expected = 90.0 + math.atan(161.0 / 70.0) * 180.0 / math.pi
    assert angles.tilt == pytest.approx(expected, abs=1e-9)
    assert angles.tilt == pytest.approx(156.50143432404792, abs=1e-9)


def test_pan_follows_atan2():
    right = aim_angles(GroundPoint(CFG.mount_point.x + 10.0, CFG.mount_point.y), CFG)
    ahead = aim_angles(GroundPoint(CFG.mount_point.x, CFG.mount_point.y + 10.0), CFG)
    assert right.pan == pytest.approx(0.0)
    assert ahead.pan == pytest.approx(90.0)


def test_out_of_reach_rejected():
    target = GroundPoint(CFG.mount_point.x + 162.0, CFG.mount_point.y)
    with pytest.raises(OutOfReachError):
        aim_angles(target, CFG)


def test_aim_inverse_recovers_target():
    rng = np.random.default_rng(19)
    for _ in range(50):
        angle = rng.uniform(0, 2 * math.pi)
        r = rng.uniform(0, CFG.max_reach_r1)
        target = GroundPoint(CFG.mount_point.x + r * math.cos(angle),
                             CFG.mount_point.y + r * math.sin(angle))
        angles = aim_angles(target, CFG)
        back = ground_point_of_angles(angles, CFG)
        assert back.x == pytest.approx(target.x, abs=1e-6)
        assert back.y == pytest.approx(target.y, abs=1e-6)


def test_tilt_stays_within_bounds():
    rng = np.random.default_rng(20)
    tilt_max = 90.0 + math.degrees(math.atan(CFG.max_reach_r1 / CFG.mount_height))
    for _ in range(50):
        angle = rng.uniform(0, 2 * math.pi)
        r = rng.uniform(0, CFG.max_reach_r1)
        target = GroundPoint(CFG.mount_point.x + r * math.cos(angle),
                             CFG.mount_point.y + r * math.sin(angle))
        tilt = aim_angles(target, CFG).tilt
        assert 90.0 <= tilt <= tilt_max + 1e-9


# --- spread curve -------------------------------------------------------------

def test_spread_flat_at_one_below_50():
    assert spread_radius(0.0, CFG) == 1.0
    assert spread_radius(30.0, CFG) == 1.0
    assert spread_radius(50.0, CFG) == 1.0


def test_spread_max_at_reach():
    assert spread_radius(161.0, CFG) == 14.0


def test_spread_midpoint_interpolates():
    # halfway between the knots (50, 1) and (161, 14): (1 + 14) / 2
    assert spread_radius(105.5, CFG) == pytest.approx(7.5)


def test_spread_outside_domain_rejected():
    with pytest.raises(DomainError):
        spread_radius(-0.1, CFG)
    with pytest.raises(DomainError):
        spread_radius(161.5, CFG)


def test_spread_monotone_and_continuous():
    r1s = np.linspace(0.0, 161.0, 1611)
    values = [spread_radius(float(r), CFG) for r in r1s]
    diffs = np.diff(values)
    assert np.all(diffs >= -1e-12)
    assert np.max(np.abs(diffs)) < 0.05  # no jumps at 0.1 cm step


def test_spread_knots_must_increase():
    with pytest.raises(DomainError):
        SprayerConfig(spread_knots=((0.0, 1.0), (0.0, 2.0)))


# --- plan execution -----------------------------------------------------------

def test_execute_empty_plan():
    plan = plan_nearest_neighbor(CFG.mount_point, [])
    log = execute_plan(plan, [], CFG)
    assert log.events == ()
    assert log.total_time == 0.0


def test_execute_single_weed_near_center():
    target = GroundPoint(CFG.mount_point.x + 5.0, CFG.mount_point.y)
    plan = plan_nearest_neighbor(CFG.mount_point, [target])
    log = execute_plan(plan, [(target, 1.0)], CFG)
    assert len(log.events) == 1
    event = log.events[0]
    assert event.dwell == 0.5
    assert event.r2 == 1.0
    assert event.covered  # spread 1 cm covers a radius-1 weed
    bigger = execute_plan(plan, [(target, 1.5)], CFG)
    assert not bigger.events[0].covered


def test_execute_three_weeds_hand_recomputed_total():
    targets = [GroundPoint(CFG.mount_point.x + 20.0, CFG.mount_point.y),
               GroundPoint(CFG.mount_point.x, CFG.mount_point.y - 15.0),
               GroundPoint(CFG.mount_point.x - 40.0, CFG.mount_point.y + 10.0)]
    plan = plan_nearest_neighbor(CFG.mount_point, targets)
    log = execute_plan(plan, [(t, 2.0) for t in targets], CFG)

    # independent recomputation of the time budget from the same geometry
    def angles_of(p):
        dx, dy = p.x - CFG.mount_point.x, p.y - CFG.mount_point.y
        r1 = math.hypot(dx, dy)
        return (math.degrees(math.atan2(dy, dx)),
                90.0 + math.degrees(math.atan(r1 / CFG.mount_height)))

    expected = 0.0
    prev = (0.0, 90.0)
    for idx in plan.order:
        pan, tilt = angles_of(targets[idx])
        dpan = abs(math.remainder(pan - prev[0], 360.0))
        expected += max(dpan, abs(tilt - prev[1])) / CFG.slew_rate + CFG.dwell_time
        prev = (pan, tilt)
    assert log.total_time == pytest.approx(expected, rel=1e-12)
    times = [e.t_start for e in log.events]
    assert times == sorted(times)
    assert all(b > a for a, b in zip(times, times[1:]))


def test_execute_truncates_at_unreachable_target():
    ok = GroundPoint(CFG.mount_point.x + 10.0, CFG.mount_point.y)
    far = GroundPoint(CFG.mount_point.x + 200.0, CFG.mount_point.y)
    plan = plan_nearest_neighbor(CFG.mount_point, [ok, far])
    with pytest.raises(OutOfReachError, match="target 1") as exc:
        execute_plan(plan, [(ok, 1.0), (far, 1.0)], CFG)
    assert len(exc.value.partial_log.events) == 1
    assert exc.value.partial_log.events[0].target_index == 0


def test_execution_time_is_additive_over_concatenation():
    a = GroundPoint(CFG.mount_point.x + 12.0, CFG.mount_point.y + 3.0)
    b = GroundPoint(CFG.mount_point.x - 7.0, CFG.mount_point.y - 9.0)
    c = GroundPoint(CFG.mount_point.x + 2.0, CFG.mount_point.y - 20.0)
    plan_a = plan_nearest_neighbor(CFG.mount_point, [a, b])
    plan_b = plan_nearest_neighbor(CFG.mount_point, [c])
    log_a = execute_plan(plan_a, [a, b], CFG)
    log_b = execute_plan(plan_b, [c], CFG)
    # running B after A: offset B's event times by A's total duration
    stitched = [e.t_start for e in log_a.events] + \
               [e.t_start + log_a.total_time for e in log_b.events]
    assert all(t2 > t1 for t1, t2 in zip(stitched, stitched[1:]))
    assert log_a.total_time + log_b.total_time == pytest.approx(
        (log_b.events[-1].t_start + log_a.total_time) + log_b.events[-1].dwell)


def test_spray_log_csv_shape():
    target = GroundPoint(CFG.mount_point.x + 5.0, CFG.mount_point.y)
    plan = plan_nearest_neighbor(CFG.mount_point, [target])
    log = execute_plan(plan, [(target, 1.0)], CFG)
    lines = log.to_csv().strip().split("\n")
    assert lines[0] == "idx,pan_deg,tilt_deg,r1_cm,r2_cm,t_start_s,dwell_s,covered"
    assert len(lines) == 2
    assert lines[1].endswith(",1")  # covered flag
