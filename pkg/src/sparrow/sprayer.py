"""Turret inverse kinematics, spread model, and timed execution of spray plans.

The nozzle hangs ``mount_height`` cm above its normal aim point, which is
the center of the camera footprint.  Aiming at a ground target r1 cm away
from that point tilts the nozzle from straight-down (90 degrees) by
atan(r1 / height).  The wetted radius r2 grows with r1 along a
piecewise-linear curve measured on the physical rig: 1 cm out to r1 = 50,
then linear up to 14 cm at the maximum reach of 161 cm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, OutOfReachError, ValidationError
from .field import GroundPoint

DEFAULT_SPREAD_KNOTS = ((0.0, 1.0), (50.0, 1.0), (161.0, 14.0))


@dataclass(frozen=True)
class SprayerConfig:
    """Mount geometry, reach, and timing of the sprayer turret."""

    mount_height: float = 70.0
    mount_point: GroundPoint = field(default_factory=lambda: GroundPoint(0.0, 25.5))
    max_reach_r1: float = 161.0
    dwell_time: float = 0.5
    slew_rate: float = 90.0
    spread_knots: tuple[tuple[float, float], ...] = DEFAULT_SPREAD_KNOTS

    def __post_init__(self):
        if self.mount_height <= 0:
            raise DomainError("mount_height must be > 0")
        if self.max_reach_r1 <= 0:
            raise DomainError("max_reach_r1 must be > 0")
        if self.dwell_time < 0:
            raise DomainError("dwell_time must be >= 0")
        if self.slew_rate <= 0:
            raise DomainError("slew_rate must be > 0")
        r1s = [k[0] for k in self.spread_knots]
        if len(r1s) < 2 or any(b <= a for a, b in zip(r1s, r1s[1:])):
            raise DomainError("spread_knots must be strictly increasing in r1")


@dataclass(frozen=True)
class TurretAngles:
    """Pan/tilt solution for a ground target.

    Pan is atan2(dy, dx) in the footprint frame, in degrees, so a target
    straight ahead of the nozzle sits at pan = 90.  Tilt is 90 when the
    nozzle points straight down and grows as it aims farther away.
    """

    pan: float
    tilt: float


@dataclass(frozen=True)
class SprayEvent:
    target_index: int
    angles: TurretAngles
    r1: float
    r2: float
    t_start: float
    dwell: float
    covered: bool


@dataclass(frozen=True)
class SprayLog:
    """Timed sequence of spray events for one executed plan."""

    events: tuple[SprayEvent, ...]
    total_time: float

    def to_csv(self) -> str:
        lines = ["idx,pan_deg,tilt_deg,r1_cm,r2_cm,t_start_s,dwell_s,covered"]
        for e in self.events:
            lines.append(
                f"{e.target_index},{e.angles.pan:.6f},{e.angles.tilt:.6f},"
                f"{e.r1:.6f},{e.r2:.6f},{e.t_start:.6f},{e.dwell:.6f},"
                f"{1 if e.covered else 0}"
            )
        return "\n".join(lines) + "\n"


def aim_angles(target: GroundPoint, cfg: SprayerConfig) -> TurretAngles:
    """Pan/tilt angles that point the nozzle at a ground target.

    Raises OutOfReachError when the target's planar distance from the
    nozzle's normal aim point exceeds max_reach_r1.
    """
    dx = target.x - cfg.mount_point.x
    dy = target.y - cfg.mount_point.y
    r1 = math.hypot(dx, dy)
    if r1 > cfg.max_reach_r1:
        raise OutOfReachError(
            f"target ({target.x}, {target.y}) at r1={r1:.3f} cm exceeds "
            f"max reach {cfg.max_reach_r1} cm"
        )
    pan = math.degrees(math.atan2(dy, dx)) if r1 > 0 else 0.0
    tilt = 90.0 + math.degrees(math.atan(r1 / cfg.mount_height))
    return TurretAngles(pan=pan, tilt=tilt)


def ground_point_of_angles(angles: TurretAngles, cfg: SprayerConfig) -> GroundPoint:
    """Ground intersection of the nozzle axis for given angles (IK inverse)."""
    r1 = cfg.mount_height * math.tan(math.radians(angles.tilt - 90.0))
    pan = math.radians(angles.pan)
    return GroundPoint(
        cfg.mount_point.x + r1 * math.cos(pan),
        cfg.mount_point.y + r1 * math.sin(pan),
    )


def spread_radius(r1: float, cfg: SprayerConfig) -> float:
    """Wetted radius r2 for an aim distance r1, by piecewise-linear interpolation."""
    if not (0.0 <= r1 <= cfg.max_reach_r1):
        raise DomainError(f"r1={r1} outside [0, {cfg.max_reach_r1}]")
    knots = cfg.spread_knots
    if r1 <= knots[0][0]:
        return knots[0][1]
    for (a, fa), (b, fb) in zip(knots, knots[1:]):
        if r1 <= b:
            return fa + (fb - fa) * (r1 - a) / (b - a)
    return knots[-1][1]


def _pan_difference(a: float, b: float) -> float:
    """Smallest absolute angular difference between two pan angles, degrees."""
    d = math.fmod(b - a, 360.0)
    if d > 180.0:
        d -= 360.0
    elif d < -180.0:
        d += 360.0
    return abs(d)


def _as_target(weed) -> tuple[GroundPoint, float]:
    """Accept GroundPoint, (GroundPoint, radius), or any object with .point/.radius."""
    if isinstance(weed, GroundPoint):
        return weed, 0.0
    if hasattr(weed, "point") and hasattr(weed, "radius"):
        return weed.point, float(weed.radius)
    point, radius = weed
    return point, float(radius)


def execute_plan(plan, weeds, cfg: SprayerConfig, slew_rate: float | None = None) -> SprayLog:
    """Execute a SprayPlan over the given weeds into a timed spray log.

    ``weeds`` is the full target list the plan's order indexes into; each
    entry may be a GroundPoint, a (GroundPoint, radius) pair, or a Weed.
    Slewing moves pan and tilt simultaneously at one angular rate, so the
    slew time between targets is the larger angle delta over the rate.
    The coverage flag marks events whose spread radius reaches the weed's
    own radius; execution does not re-aim to compensate.

    Raises OutOfReachError at the first unreachable target; the partial
    log built so far is attached to the error.
    """
    rate = cfg.slew_rate if slew_rate is None else slew_rate
    if rate <= 0:
        raise DomainError("slew rate must be > 0")
    targets = [_as_target(w) for w in weeds]
    order = list(plan.order)
    if sorted(order) != list(range(len(targets))):
        raise ValidationError("plan order is not a permutation of the weed indices")

    events: list[SprayEvent] = []
    t = 0.0
    current = TurretAngles(pan=0.0, tilt=90.0)  # rest pose: straight down
    for idx in order:
        point, radius = targets[idx]
        try:
            angles = aim_angles(point, cfg)
        except OutOfReachError as exc:
            partial = SprayLog(events=tuple(events), total_time=t)
            raise OutOfReachError(
                f"target {idx}: {exc}", partial_log=partial
            ) from None
        slew = max(_pan_difference(current.pan, angles.pan),
                   abs(angles.tilt - current.tilt)) / rate
        t += slew
        r1 = point.distance_to(cfg.mount_point)
        r2 = spread_radius(r1, cfg)
        events.append(SprayEvent(
            target_index=idx, angles=angles, r1=r1, r2=r2,
            t_start=t, dwell=cfg.dwell_time, covered=r2 >= radius,
        ))
        t += cfg.dwell_time
        current = angles
    return SprayLog(events=tuple(events), total_time=t)
