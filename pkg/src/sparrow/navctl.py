"""Proportional row-following controller and unicycle kinematics.

The controller is a pure proportional law: angular velocity equals the
gain times the measured row angle error, while linear velocity stays
constant.  The plant is a unicycle integrated with midpoint heading.
Heading error decays geometrically whenever 0 < alpha * dt < 2.

Angle sign convention, shared with the perception triangle scan: the
error is positive when the row line leans right of vertical in the
camera frame, which happens when the robot has turned left of the row.
Lateral offset is not directly controlled; with a pure heading law the
robot converges to driving parallel to the row at whatever lateral
offset it ended up with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoRowError
from .scenario import CropRow, Scenario
from . import perception


def normalize_heading(deg: float) -> float:
    """Wrap an angle in degrees to (-180, 180]."""
    r = math.fmod(deg, 360.0)
    if r <= -180.0:
        r += 360.0
    elif r > 180.0:
        r -= 360.0
    return r


@dataclass(frozen=True)
class RobotPose:
    """World-frame pose: x along the rows, y lateral, heading in degrees."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.x, self.y, self.heading))):
            raise DomainError("pose components must be finite")
        object.__setattr__(self, "heading", normalize_heading(self.heading))


@dataclass(frozen=True)
class Twist:
    """Commanded velocities: v in cm/s, omega in deg/s."""

    v: float
    omega: float

    def __post_init__(self):
        if self.v < 0:
            raise DomainError("linear velocity must be >= 0")


def control_step(delta_theta: float, alpha: float, speed: float = 20.0) -> Twist:
    """Proportional steering: omega = alpha * delta_theta at constant speed."""
    if not (math.isfinite(delta_theta) and math.isfinite(alpha)):
        raise DomainError("controller inputs must be finite")
    return Twist(v=speed, omega=alpha * delta_theta)


def integrate_pose(pose: RobotPose, twist: Twist, dt: float) -> RobotPose:
    """Advance a unicycle one step with midpoint heading integration."""
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    mid = math.radians(pose.heading + twist.omega * dt / 2.0)
    return RobotPose(
        x=pose.x + twist.v * dt * math.cos(mid),
        y=pose.y + twist.v * dt * math.sin(mid),
        heading=normalize_heading(pose.heading + twist.omega * dt),
    )


def central_row(scenario: Scenario, lateral: float) -> CropRow:
    """The crop row whose centerline is closest to a lateral position."""
    return min(scenario.rows, key=lambda r: (abs(r.offset - lateral), r.offset))


def analytic_delta_theta(pose: RobotPose) -> float:
    """Row angle error straight from geometry: rows run along world +x."""
    return normalize_heading(-pose.heading)


@dataclass(frozen=True)
class StepRecord:
    t: float
    x: float
    y: float
    heading: float
    delta_theta: float
    omega: float


@dataclass(frozen=True)
class RowFollowResult:
    """Trajectory of one row-following run plus its angle-error series."""

    steps: tuple[StepRecord, ...]
    row: CropRow
    completed: bool
    abort_reason: str | None = None

    @property
    def delta_thetas(self) -> list[float]:
        return [s.delta_theta for s in self.steps]

    def to_csv(self) -> str:
        lines = ["t,x,y,heading_deg,delta_theta_deg,omega_deg_s"]
        for s in self.steps:
            lines.append(
                f"{s.t:.6f},{s.x:.6f},{s.y:.6f},{s.heading:.6f},"
                f"{s.delta_theta:.6f},{s.omega:.6f}"
            )
        return "\n".join(lines) + "\n"


def run_row_following(scenario: Scenario, steps: int,
                      perception_source: str = "analytic",
                      initial_pose: RobotPose | None = None,
                      noise="none",
                      pipeline_params=None) -> RowFollowResult:
    """Closed-loop row following for a fixed number of control steps.

    The angle error per step comes either from row geometry directly
    ("analytic") or from rendering the camera view at the current pose
    and running the full perception pipeline ("pipeline").  A no-row
    failure of the pipeline aborts the run; the partial trajectory comes
    back flagged with the reason.
    """
    if steps <= 0:
        raise DomainError(f"steps must be > 0, got {steps}")
    if perception_source not in ("analytic", "pipeline"):
        raise DomainError(f"unknown perception source {perception_source!r}")
    ctl = scenario.controller
    row = central_row(scenario, initial_pose.y if initial_pose else 0.0)
    pose = initial_pose or RobotPose(x=0.0, y=row.offset, heading=0.0)

    records = []
    t = 0.0
    for k in range(steps):
        if perception_source == "analytic":
            delta = analytic_delta_theta(pose)
        else:
            img, _ = perception.render_field(
                scenario, noise=noise, seed=scenario.seed + k, pose=pose)
            try:
                _, detection = perception.run_pipeline(img, pipeline_params)
            except NoRowError as exc:
                return RowFollowResult(steps=tuple(records), row=row,
                                       completed=False, abort_reason=str(exc))
            delta = detection.delta_theta
        twist = control_step(delta, ctl.alpha, ctl.speed)
        records.append(StepRecord(t=t, x=pose.x, y=pose.y, heading=pose.heading,
                                  delta_theta=delta, omega=twist.omega))
        pose = integrate_pose(pose, twist, ctl.dt)
        t += ctl.dt
    return RowFollowResult(steps=tuple(records), row=row, completed=True)
