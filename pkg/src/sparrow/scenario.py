"""Scenario definition, the text document format, and its parser.

A scenario document is line-oriented UTF-8 text.  Each non-empty line is
either ``key = value`` or a repeated entry ``weed = x,y,r``,
``row = offset,width`` or ``spread_knot = r1,r2``.  ``#`` starts a comment
anywhere on a line.  Lengths are cm, angles degrees, times seconds.
Scalar keys may appear at most once; unknown keys are rejected.

World-frame conventions: weed ``x`` is the along-field coordinate
(driving direction), ``y`` the lateral offset; a row is an infinite band
parallel to the driving direction at lateral offset ``offset``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ScenarioError
from .field import CameraFootprint, GroundPoint, footprint_center
from .sprayer import DEFAULT_SPREAD_KNOTS, SprayerConfig


@dataclass(frozen=True)
class CropRow:
    """One crop row: a band at a lateral world offset with a physical width."""

    offset: float
    width: float


@dataclass(frozen=True)
class Weed:
    point: GroundPoint
    radius: float


@dataclass(frozen=True)
class ControllerConfig:
    alpha: float = 0.8
    speed: float = 20.0
    dt: float = 0.1


@dataclass(frozen=True)
class DetectorConfig:
    """Parameters of the simulated weed detector.

    Confidence grows linearly with bounding-box area up to
    ``reference_area`` and clamps at ``confidence_max`` beyond it, matching
    the measured trend that bigger weeds are detected more confidently.
    """

    detection_range: float = 51.0
    confidence_min: float = 0.4
    confidence_max: float = 0.95
    reference_area: float = 100.0
    miss_rate: float = 0.0


@dataclass(frozen=True)
class Scenario:
    """Full description of one simulated mission; immutable once built."""

    footprint: CameraFootprint = field(default_factory=CameraFootprint)
    rows: tuple[CropRow, ...] = (CropRow(0.0, 10.0),)
    weeds: tuple[Weed, ...] = ()
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    sprayer: SprayerConfig = field(default_factory=SprayerConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    seed: int = 0
    field_length: float = 500.0


_SCALAR_KEYS = {
    "seed", "field_length",
    "footprint_width", "footprint_depth", "image_width", "image_height",
    "alpha", "speed", "dt",
    "mount_height", "mount_x", "mount_y", "max_reach", "dwell_time", "slew_rate",
    "detection_range", "confidence_min", "confidence_max",
    "reference_area", "miss_rate",
}
_REPEATED_KEYS = {"weed", "row", "spread_knot"}
_INT_KEYS = {"seed", "image_width", "image_height"}


def _parse_number(text: str, key: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScenarioError(f"value for '{key}' is not a number: {text!r}", line) from None
    if not math.isfinite(value):
        raise ScenarioError(f"value for '{key}' must be finite", line)
    return value


def _parse_tuple(text: str, key: str, arity: int, line: int) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != arity:
        raise ScenarioError(
            f"'{key}' expects {arity} comma-separated values, got {len(parts)}", line
        )
    return tuple(_parse_number(p, key, line) for p in parts)


def validate_scenario(sc: Scenario) -> None:
    """Raise ScenarioError naming the offending field on any invariant violation."""
    if not sc.rows:
        raise ScenarioError("rows: at least one crop row is required")
    for i, row in enumerate(sc.rows):
        if row.width <= 0:
            raise ScenarioError(f"rows[{i}].width must be > 0, got {row.width}")
    for i, weed in enumerate(sc.weeds):
        if weed.radius <= 0:
            raise ScenarioError(f"weeds[{i}].radius must be > 0, got {weed.radius}")
    if sc.controller.dt <= 0:
        raise ScenarioError(f"dt must be > 0, got {sc.controller.dt}")
    if sc.controller.speed < 0:
        raise ScenarioError(f"speed must be >= 0, got {sc.controller.speed}")
    if sc.field_length <= 0:
        raise ScenarioError(f"field_length must be > 0, got {sc.field_length}")
    if sc.seed < 0:
        raise ScenarioError(f"seed must be >= 0, got {sc.seed}")
    det = sc.detector
    if not (0.0 <= det.confidence_min <= det.confidence_max <= 1.0):
        raise ScenarioError(
            "confidence_min/confidence_max must satisfy 0 <= min <= max <= 1, "
            f"got {det.confidence_min}/{det.confidence_max}"
        )
    if not (0.0 <= det.miss_rate <= 1.0):
        raise ScenarioError(f"miss_rate must be in [0, 1], got {det.miss_rate}")
    if det.detection_range <= 0:
        raise ScenarioError(f"detection_range must be > 0, got {det.detection_range}")
    if det.reference_area <= 0:
        raise ScenarioError(f"reference_area must be > 0, got {det.reference_area}")


def load_scenario(text: str) -> Scenario:
    """Parse a scenario document into a validated Scenario.

    Parse errors carry the 1-based line number; invariant violations name
    the offending field.  Defaults apply to every key left unset.
    """
    scalars: dict[str, float] = {}
    scalar_lines: dict[str, int] = {}
    weeds: list[Weed] = []
    rows: list[CropRow] = []
    knots: list[tuple[float, float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _REPEATED_KEYS:
            if key == "weed":
                x, y, r = _parse_tuple(value, key, 3, lineno)
                weeds.append(Weed(GroundPoint(x, y), r))
            elif key == "row":
                offset, width = _parse_tuple(value, key, 2, lineno)
                rows.append(CropRow(offset, width))
            else:
                knots.append(_parse_tuple(value, key, 2, lineno))
        elif key in _SCALAR_KEYS:
            if key in scalars:
                raise ScenarioError(
                    f"duplicate key '{key}' (first set on line {scalar_lines[key]})",
                    lineno,
                )
            scalars[key] = _parse_number(value, key, lineno)
            scalar_lines[key] = lineno
        else:
            raise ScenarioError(f"unknown key '{key}'", lineno)

    for key in _INT_KEYS & scalars.keys():
        if scalars[key] != int(scalars[key]):
            raise ScenarioError(f"'{key}' must be an integer", scalar_lines[key])
        scalars[key] = int(scalars[key])

    def take(key, default):
        return scalars.get(key, default)

    try:
        footprint = CameraFootprint(
            width=take("footprint_width", 96.0),
            depth=take("footprint_depth", 51.0),
            image_width=take("image_width", 960),
            image_height=take("image_height", 510),
        )
    except Exception as exc:
        raise ScenarioError(str(exc)) from None

    center = footprint_center(footprint)
    try:
        sprayer = SprayerConfig(
            mount_height=take("mount_height", 70.0),
            mount_point=GroundPoint(take("mount_x", center.x), take("mount_y", center.y)),
            max_reach_r1=take("max_reach", 161.0),
            dwell_time=take("dwell_time", 0.5),
            slew_rate=take("slew_rate", 90.0),
            spread_knots=tuple(knots) if knots else DEFAULT_SPREAD_KNOTS,
        )
    except Exception as exc:
        raise ScenarioError(str(exc)) from None

    sc = Scenario(
        footprint=footprint,
        rows=tuple(rows) if rows else (CropRow(0.0, 10.0),),
        weeds=tuple(weeds),
        controller=ControllerConfig(
            alpha=take("alpha", 0.8),
            speed=take("speed", 20.0),
            dt=take("dt", 0.1),
        ),
        sprayer=sprayer,
        detector=DetectorConfig(
            detection_range=take("detection_range", footprint.depth),
            confidence_min=take("confidence_min", 0.4),
            confidence_max=take("confidence_max", 0.95),
            reference_area=take("reference_area", 100.0),
            miss_rate=take("miss_rate", 0.0),
        ),
        seed=take("seed", 0),
        field_length=take("field_length", 500.0),
    )
    validate_scenario(sc)
    return sc


def serialize_scenario(sc: Scenario) -> str:
    """Canonical document for a Scenario; load_scenario inverts it exactly."""
    out = [
        f"seed = {sc.seed}",
        f"field_length = {sc.field_length!r}",
        f"footprint_width = {sc.footprint.width!r}",
        f"footprint_depth = {sc.footprint.depth!r}",
        f"image_width = {sc.footprint.image_width}",
        f"image_height = {sc.footprint.image_height}",
        f"alpha = {sc.controller.alpha!r}",
        f"speed = {sc.controller.speed!r}",
        f"dt = {sc.controller.dt!r}",
        f"mount_height = {sc.sprayer.mount_height!r}",
        f"mount_x = {sc.sprayer.mount_point.x!r}",
        f"mount_y = {sc.sprayer.mount_point.y!r}",
        f"max_reach = {sc.sprayer.max_reach_r1!r}",
        f"dwell_time = {sc.sprayer.dwell_time!r}",
        f"slew_rate = {sc.sprayer.slew_rate!r}",
        f"detection_range = {sc.detector.detection_range!r}",
        f"confidence_min = {sc.detector.confidence_min!r}",
        f"confidence_max = {sc.detector.confidence_max!r}",
        f"reference_area = {sc.detector.reference_area!r}",
        f"miss_rate = {sc.detector.miss_rate!r}",
    ]
    for knot in sc.sprayer.spread_knots:
        out.append(f"spread_knot = {knot[0]!r}, {knot[1]!r}")
    for row in sc.rows:
        out.append(f"row = {row.offset!r}, {row.width!r}")
    for weed in sc.weeds:
        out.append(f"weed = {weed.point.x!r}, {weed.point.y!r}, {weed.radius!r}")
    return "\n".join(out) + "\n"


def with_seed(sc: Scenario, seed: int) -> Scenario:
    """Return a copy of the scenario with its seed replaced."""
    return replace(sc, seed=seed)
