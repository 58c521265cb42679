"""Acceptance suite: one test per release criterion.

Each test prints one `[acceptance] <name>: PASS|FAIL` line (run with
`pytest -s tests/test_acceptance.py -v` to see them) and enforces the
criterion at its stated tolerance and time budget.
"""

import itertools
import math
import os
import time

import numpy as np

from sparrow import (GroundPoint, RobotPose, Scenario, SprayerConfig,
                     aim_angles, control_step, evaluate_planners, iou,
                     load_scenario, plan_christofides, plan_optimal_heldkarp,
                     random_instance, run_mission, run_pipeline,
                     run_row_following, spread_radius, synthetic_corpus,
                     transition)
from sparrow.cli import main as cli_main
from sparrow.coordinator import (ACTION_DRIVE_STEP, EVENT_PLAN_READY,
                                 EVENT_ROW_LOST, EVENT_SPRAY_COMPLETE,
                                 EVENT_STEP_TICK, EVENT_WEED_DETECTED,
                                 Detection, MissionEvent, MissionState,
                                 PHASE_SPRAYING, PHASE_SUSPENDED)
from sparrow.planner import plan_nearest_neighbor


def _check(name: str, condition: bool, detail: str = "") -> None:
    status = "PASS" if condition else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] {name}: {status}{suffix}")
    assert condition, f"{name}: {detail}"


def test_christofides_bound():
    start = time.monotonic()
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(3, 13))
        ref, weeds = random_instance(n, rng)
        plan = plan_christofides(ref, weeds)
        assert plan.matching == "exact"
        opt = plan_optimal_heldkarp(ref, weeds)
        worst = max(worst, plan.length / opt.length)
    elapsed = time.monotonic() - start
    _check("christofides-1.5x-bound",
           worst <= 1.5 and elapsed < 30.0,
           f"worst ratio {worst:.4f}, {elapsed:.1f}s over 500 instances")


def test_oracle_correctness():
    start = time.monotonic()
    rng = np.random.default_rng(321)
    worst_gap = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        ref, weeds = random_instance(n, rng)
        hk = plan_optimal_heldkarp(ref, weeds)
        pts = [(w.x, w.y) for w in weeds]
        r = (ref.x, ref.y)
        best = math.inf
        for perm in itertools.permutations(range(n)):
            chain = [r] + [pts[i] for i in perm] + [r]
            best = min(best, sum(math.dist(a, b)
                                 for a, b in zip(chain, chain[1:])))
        # equality as real numbers; float summation order caps agreement
        # at around 1e-12 relative
        worst_gap = max(worst_gap, abs(hk.length - best))
    elapsed = time.monotonic() - start
    _check("held-karp-equals-brute-force",
           worst_gap <= 1e-9 and elapsed < 60.0,
           f"worst gap {worst_gap:.2e} cm, {elapsed:.1f}s over 200 instances")


def _evaluation():
    return evaluate_planners(100, (5, 12), seed=7)


def test_phi_sanity_band():
    start = time.monotonic()
    rows, _ = _evaluation()
    elapsed = time.monotonic() - start
    mean_n = sum(r.phi_n for r in rows) / len(rows)
    mean_c = sum(r.phi_c for r in rows) / len(rows)
    all_bounded = all(r.phi_n <= 1.0 + 1e-12 and r.phi_c <= 1.0 + 1e-12
                      for r in rows)
    _check("phi-sanity-band",
           0.85 <= mean_n <= 1.0 and 0.85 <= mean_c <= 1.0
           and all_bounded and elapsed < 60.0,
           f"mean phi_n {mean_n:.4f}, mean phi_c {mean_c:.4f}, {elapsed:.1f}s")


def test_weed_count_trend():
    _, summary = _evaluation()
    by_n = {s.n: s for s in summary}
    top = by_n[max(by_n)]
    strict = top.mean_phi_c > top.mean_phi_n
    tolerant = abs(top.mean_phi_c - top.mean_phi_n) <= 0.01
    branch = "strict" if strict else "within-0.01 tolerance"
    _check("christofides-trend-at-high-n", strict or tolerant,
           f"n={top.n}: phi_c {top.mean_phi_c:.4f} vs phi_n {top.mean_phi_n:.4f}, "
           f"{branch} branch")


def test_sprayer_knots():
    cfg = SprayerConfig()
    r2_50 = spread_radius(50.0, cfg)
    r2_161 = spread_radius(161.0, cfg)
    tilt_0 = aim_angles(cfg.mount_point, cfg).tilt
    tilt_70 = aim_angles(GroundPoint(cfg.mount_point.x + 70.0,
                                     cfg.mount_point.y), cfg).tilt
    _check("sprayer-knots",
           r2_50 == 1.0 and r2_161 == 14.0 and tilt_0 == 90.0
           and abs(tilt_70 - 135.0) <= 1e-9,
           f"r2(50)={r2_50}, r2(161)={r2_161}, tilt(0)={tilt_0}, "
           f"tilt(70)={tilt_70:.12f}")


def test_controller_convergence():
    sc = Scenario()  # alpha 0.8, dt 0.1
    start_pose = RobotPose(x=0.0, y=0.0, heading=10.0)
    result = run_row_following(sc, steps=100, initial_pose=start_pose)
    final_error = abs(result.steps[-1].heading)
    reached = next((i for i, s in enumerate(result.steps)
                    if abs(s.heading) < 0.5), None)
    alpha = 0.8
    a, b = 6.25, -1.75
    linear = math.isclose(control_step(a + b, alpha).omega,
                          control_step(a, alpha).omega
                          + control_step(b, alpha).omega,
                          rel_tol=1e-12, abs_tol=1e-12)
    _check("controller-convergence",
           reached is not None and final_error < 0.5 and linear,
           f"|error|<0.5deg after {reached} steps, final {final_error:.4f}deg, "
           f"linearity {linear}")


def test_perception_floor():
    start = time.monotonic()
    noisy = synthetic_corpus(20, noise="field", seed=11)
    noisy_scores = [iou(run_pipeline(img)[0], truth) for img, truth in noisy]
    clean = synthetic_corpus(20, noise="none", seed=11)
    clean_scores = [iou(run_pipeline(img)[0], truth) for img, truth in clean]
    elapsed = time.monotonic() - start
    mean_noisy = sum(noisy_scores) / len(noisy_scores)
    mean_clean = sum(clean_scores) / len(clean_scores)
    _check("perception-iou-floor",
           mean_noisy >= 0.39 and mean_clean >= 0.9 and elapsed < 60.0,
           f"field {mean_noisy:.4f} (floor 0.39), clean {mean_clean:.4f} "
           f"(floor 0.90), {elapsed:.1f}s")


def test_state_machine_safety():
    det = Detection(weed_index=0, point=GroundPoint(3.0, 20.0),
                    area_cm2=25.0, confidence=0.6)
    plan = plan_nearest_neighbor(GroundPoint(0.0, 25.5), [GroundPoint(3.0, 20.0)])
    events = [
        MissionEvent(EVENT_WEED_DETECTED, detections=(det,)),
        MissionEvent(EVENT_PLAN_READY, plan=plan),
        MissionEvent(EVENT_SPRAY_COMPLETE),
        MissionEvent(EVENT_STEP_TICK),
        MissionEvent(EVENT_ROW_LOST),
    ]
    rng = np.random.default_rng(2024)
    violations = 0
    for _ in range(10000):
        state = MissionState()
        for _ in range(int(rng.integers(1, 16))):
            event = events[int(rng.integers(0, len(events)))]
            before = state
            state, actions = transition(state, event)
            if ACTION_DRIVE_STEP in actions and before.phase in (
                    PHASE_SUSPENDED, PHASE_SPRAYING):
                violations += 1
    _check("state-machine-safety", violations == 0,
           f"{violations} violations over 10000 randomized sequences")


def test_end_to_end_determinism(tmp_path, golden_scenario_path):
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    code_a = cli_main(["run", "--scenario", golden_scenario_path, "--out", out_a])
    code_b = cli_main(["run", "--scenario", golden_scenario_path, "--out", out_b])

    def tree(root):
        result = {}
        for dirpath, _, names in os.walk(root):
            for name in names:
                path = os.path.join(dirpath, name)
                with open(path, "rb") as fh:
                    result[os.path.relpath(path, root)] = fh.read()
        return result

    identical = tree(out_a) == tree(out_b)
    _check("end-to-end-determinism",
           code_a == 0 and code_b == 0 and identical,
           f"exit codes {code_a}/{code_b}, byte-identical {identical}")


def test_mission_completeness(golden_scenario_text):
    sc = load_scenario(golden_scenario_text)
    assert sc.detector.miss_rate == 0.0
    assert len(sc.weeds) == 5
    report = run_mission(sc)
    sprayed_indices = [e.target_index for log in report.spray_logs
                       for e in log.events]
    per_plan_unique = all(
        len({e.target_index for e in log.events}) == len(log.events)
        for log in report.spray_logs)
    _check("mission-completeness",
           report.status == "Completed"
           and report.totals.weeds_sprayed == 5
           and len(sprayed_indices) == 5
           and per_plan_unique,
           f"status {report.status}, sprayed {report.totals.weeds_sprayed}, "
           f"events {len(sprayed_indices)}")
