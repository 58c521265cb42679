"""Mission state machine binding navigation, detection, planning, spraying.

The subsystems talk through typed events instead of middleware topics,
but the signal contract is the same: a weed detection interrupts
navigation, the plan is built while the robot stands still, spraying
runs to completion, and a spray-complete event resumes driving.

The mission clock bookkeeping keeps timeline timestamps strictly
increasing: planning consumes one control period after the interrupt,
spraying advances the clock by the spray log's total time, and the
resume signal consumes one further control period before the next drive
tick.  Per-tick drive steps are recorded in the trajectory; the timeline
holds the phase-changing events.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import NoRowError, ValidationError
from .field import GroundPoint, footprint_center
from .navctl import (RobotPose, StepRecord, analytic_delta_theta, central_row,
                     control_step, integrate_pose)
from .planner import (SprayPlan, plan_christofides, plan_hybrid,
                      plan_nearest_neighbor, plan_optimal_heldkarp)
from .scenario import DetectorConfig, Scenario
from .sprayer import SprayLog, execute_plan
from . import perception

PHASE_NAVIGATING = "Navigating"
PHASE_SUSPENDED = "Suspended"
PHASE_SPRAYING = "Spraying"
PHASE_COMPLETED = "Completed"
PHASE_FAULTED = "Faulted"

EVENT_WEED_DETECTED = "WeedDetected"
EVENT_PLAN_READY = "PlanReady"
EVENT_SPRAY_COMPLETE = "SprayComplete"
EVENT_ROW_LOST = "RowLost"
EVENT_STEP_TICK = "StepTick"

ACTION_REQUEST_PLAN = "RequestPlan"
ACTION_EXECUTE_PLAN = "ExecutePlan"
ACTION_RESUME_DRIVE = "ResumeDrive"
ACTION_DRIVE_STEP = "DriveStep"

ROW_LOST_TICKS = 10  # consecutive no-row ticks before the mission faults


@dataclass(frozen=True)
class Detection:
    """One simulated weed detection: local footprint coordinates plus score."""

    weed_index: int
    point: GroundPoint
    area_cm2: float
    confidence: float


@dataclass(frozen=True)
class MissionEvent:
    kind: str
    detections: tuple[Detection, ...] = ()
    plan: SprayPlan | None = None
    log: SprayLog | None = None

    def __post_init__(self):
        if self.kind == EVENT_WEED_DETECTED and not self.detections:
            raise ValidationError("WeedDetected events need at least one detection")
        if self.kind == EVENT_PLAN_READY and (self.plan is None or not self.plan.order):
            raise ValidationError("PlanReady events need a non-empty plan")


@dataclass(frozen=True)
class MissionState:
    phase: str = PHASE_NAVIGATING
    pending_detections: tuple[Detection, ...] = ()
    active_plan: SprayPlan | None = None


def transition(state: MissionState, event: MissionEvent
               ) -> tuple[MissionState, tuple[str, ...]]:
    """Pure total transition function; illegal pairs are logged no-ops.

    A weed detection suspends navigation and requests a plan; a ready
    plan starts spraying; spray completion resumes driving.  A lost row
    while driving faults the mission.  DriveStep is only ever emitted
    from the Navigating phase.
    """
    phase = state.phase
    kind = event.kind
    if phase == PHASE_NAVIGATING:
        if kind == EVENT_WEED_DETECTED:
            return (MissionState(PHASE_SUSPENDED, event.detections, None),
                    (ACTION_REQUEST_PLAN,))
        if kind == EVENT_STEP_TICK:
            return state, (ACTION_DRIVE_STEP,)
        if kind == EVENT_ROW_LOST:
            return MissionState(PHASE_FAULTED, (), None), ()
    elif phase == PHASE_SUSPENDED:
        if kind == EVENT_PLAN_READY:
            return (MissionState(PHASE_SPRAYING, state.pending_detections, event.plan),
                    (ACTION_EXECUTE_PLAN,))
    elif phase == PHASE_SPRAYING:
        if kind == EVENT_SPRAY_COMPLETE:
            return MissionState(PHASE_NAVIGATING, (), None), (ACTION_RESUME_DRIVE,)
    return state, ()


def detect_weeds_simulated(pose: RobotPose, scenario: Scenario,
                           cfg: DetectorConfig, rng: np.random.Generator,
                           exclude: frozenset[int] = frozenset()
                           ) -> tuple[Detection, ...]:
    """Report unsprayed weeds inside the camera footprint, minus random misses.

    Reported coordinates are in the footprint frame at the current pose.
    Confidence grows linearly with bounding-box area (the box of a blob
    of radius r is 2r on a side) and clamps at the ceiling once the area
    reaches the reference area, so bigger weeds score higher.
    """
    fp = scenario.footprint
    forward_limit = min(fp.depth, cfg.detection_range)
    hr = math.radians(pose.heading)
    cos_h, sin_h = math.cos(hr), math.sin(hr)
    out = []
    for idx, weed in enumerate(scenario.weeds):
        if idx in exclude:
            continue
        rel_x = weed.point.x - pose.x
        rel_y = weed.point.y - pose.y
        fwd = rel_x * cos_h + rel_y * sin_h
        lat = -rel_x * sin_h + rel_y * cos_h
        if not (0.0 <= fwd <= forward_limit and abs(lat) <= fp.width / 2.0):
            continue
        if cfg.miss_rate > 0 and rng.random() < cfg.miss_rate:
            continue
        area = (2.0 * weed.radius) ** 2
        confidence = cfg.confidence_min + (cfg.confidence_max - cfg.confidence_min) \
            * min(1.0, area / cfg.reference_area)
        out.append(Detection(weed_index=idx, point=GroundPoint(lat, fwd),
                             area_cm2=area, confidence=confidence))
    return tuple(out)


@dataclass(frozen=True)
class TimelineEntry:
    t: float
    phase: str
    event: str


@dataclass(frozen=True)
class MissionTotals:
    weeds_detected: int
    weeds_sprayed: int
    weeds_covered: int
    distance_cm: float
    mission_time_s: float


@dataclass(frozen=True)
class MissionLimits:
    max_steps: int = 20000
    max_time_s: float = 3600.0


@dataclass(frozen=True)
class MissionReport:
    """Everything one mission produced, ready for serialization."""

    status: str  # Completed, Incomplete, or Faulted
    timeline: tuple[TimelineEntry, ...]
    trajectory: tuple[StepRecord, ...]
    spray_logs: tuple[SprayLog, ...]
    totals: MissionTotals
    fault_cause: str | None = None


_PLANNERS = {
    "nn": plan_nearest_neighbor,
    "christofides": plan_christofides,
    "optimal": plan_optimal_heldkarp,
}


def _make_plan(mode: str, ref: GroundPoint, targets: list[GroundPoint]) -> SprayPlan:
    if mode == "hybrid":
        return plan_hybrid(ref, targets)
    try:
        return _PLANNERS[mode](ref, targets)
    except KeyError:
        raise ValidationError(f"unknown planner mode {mode!r}") from None


def run_mission(scenario: Scenario, planner_mode: str = "hybrid",
                limits: MissionLimits | None = None,
                perception_source: str = "analytic") -> MissionReport:
    """Drive the field end to end, interrupting to spray detected weeds.

    Deterministic for a fixed scenario seed.  Every physical weed is
    sprayed at most once.  The mission completes when the robot passes
    ``field_length``, faults when the row stays lost for 10 consecutive
    perception ticks, and reports Incomplete when the step or time limit
    runs out first.
    """
    limits = limits or MissionLimits()
    ctl = scenario.controller
    rng = np.random.default_rng(scenario.seed)
    row = central_row(scenario, 0.0)
    pose = RobotPose(x=0.0, y=row.offset, heading=0.0)
    state = MissionState()
    ref = footprint_center(scenario.footprint)

    timeline = [TimelineEntry(0.0, PHASE_NAVIGATING, "MissionStart")]
    t = ctl.dt  # first control sample one period after power-on
    trajectory: list[StepRecord] = []
    spray_logs: list[SprayLog] = []
    sprayed: set[int] = set()
    detected: set[int] = set()
    covered = 0
    distance = 0.0
    no_row_ticks = 0
    status = "Incomplete"
    fault_cause = None

    steps = 0
    while steps < limits.max_steps and t <= limits.max_time_s:
        steps += 1
        if pose.x >= scenario.field_length:
            status = "Completed"
            timeline.append(TimelineEntry(t, PHASE_COMPLETED, "MissionComplete"))
            break

        detections = detect_weeds_simulated(pose, scenario, scenario.detector,
                                            rng, exclude=frozenset(sprayed))
        if detections:
            state, _ = transition(state, MissionEvent(EVENT_WEED_DETECTED,
                                                      detections=detections))
            timeline.append(TimelineEntry(t, state.phase, EVENT_WEED_DETECTED))
            detected.update(d.weed_index for d in detections)

            t += ctl.dt  # planning consumes one control period
            targets = [d.point for d in detections]
            plan = _make_plan(planner_mode, ref, targets)
            state, _ = transition(state, MissionEvent(EVENT_PLAN_READY, plan=plan))
            timeline.append(TimelineEntry(t, state.phase, EVENT_PLAN_READY))

            radii = [scenario.weeds[d.weed_index].radius for d in detections]
            log = execute_plan(plan, list(zip(targets, radii)), scenario.sprayer)
            spray_logs.append(log)
            sprayed.update(d.weed_index for d in detections)
            covered += sum(1 for e in log.events if e.covered)
            t += log.total_time
            state, _ = transition(state, MissionEvent(EVENT_SPRAY_COMPLETE, log=log))
            timeline.append(TimelineEntry(t, state.phase, EVENT_SPRAY_COMPLETE))
            t += ctl.dt  # resume consumes one control period
            continue

        state, actions = transition(state, MissionEvent(EVENT_STEP_TICK))
        if ACTION_DRIVE_STEP not in actions:
            break  # defensive: cannot happen, transition is total
        if perception_source == "analytic":
            delta = analytic_delta_theta(pose)
            no_row_ticks = 0
        else:
            img, _ = perception.render_field(scenario, seed=scenario.seed + steps,
                                             pose=pose)
            try:
                _, detection = perception.run_pipeline(img)
                delta = detection.delta_theta
                no_row_ticks = 0
            except NoRowError:
                no_row_ticks += 1
                if no_row_ticks >= ROW_LOST_TICKS:
                    state, _ = transition(state, MissionEvent(EVENT_ROW_LOST))
                    status = "Faulted"
                    fault_cause = f"row lost for {ROW_LOST_TICKS} consecutive ticks"
                    timeline.append(TimelineEntry(t, state.phase, EVENT_ROW_LOST))
                    break
                t += ctl.dt  # hold position, no measurement this tick
                continue
        twist = control_step(delta, ctl.alpha, ctl.speed)
        trajectory.append(StepRecord(t=t, x=pose.x, y=pose.y, heading=pose.heading,
                                     delta_theta=delta, omega=twist.omega))
        pose = integrate_pose(pose, twist, ctl.dt)
        distance += twist.v * ctl.dt
        t += ctl.dt
    else:
        timeline.append(TimelineEntry(t, state.phase, "MissionIncomplete"))

    totals = MissionTotals(
        weeds_detected=len(detected),
        weeds_sprayed=len(sprayed),
        weeds_covered=covered,
        distance_cm=distance,
        mission_time_s=t,
    )
    return MissionReport(status=status, timeline=tuple(timeline),
                         trajectory=tuple(trajectory), spray_logs=tuple(spray_logs),
                         totals=totals, fault_cause=fault_cause)


def write_report(report: MissionReport, out_dir: str) -> None:
    """Serialize a mission report as a directory of CSV files plus a summary."""
    os.makedirs(out_dir, exist_ok=True)
    lines = ["t_s,phase,event"]
    for e in report.timeline:
        lines.append(f"{e.t:.6f},{e.phase},{e.event}")
    _write(os.path.join(out_dir, "timeline.csv"), "\n".join(lines) + "\n")

    lines = ["t,x,y,heading_deg,delta_theta_deg,omega_deg_s"]
    for s in report.trajectory:
        lines.append(f"{s.t:.6f},{s.x:.6f},{s.y:.6f},{s.heading:.6f},"
                     f"{s.delta_theta:.6f},{s.omega:.6f}")
    _write(os.path.join(out_dir, "trajectory.csv"), "\n".join(lines) + "\n")

    for i, log in enumerate(report.spray_logs):
        _write(os.path.join(out_dir, f"spray_{i:03d}.csv"), log.to_csv())

    summary = [
        f"status={report.status}",
        f"weeds_detected={report.totals.weeds_detected}",
        f"weeds_sprayed={report.totals.weeds_sprayed}",
        f"weeds_covered={report.totals.weeds_covered}",
        f"distance_cm={report.totals.distance_cm:.6f}",
        f"mission_time_s={report.totals.mission_time_s:.6f}",
        f"spray_events={len(report.spray_logs)}",
    ]
    if report.fault_cause:
        summary.append(f"fault_cause={report.fault_cause}")
    _write(os.path.join(out_dir, "summary.txt"), "\n".join(summary) + "\n")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
