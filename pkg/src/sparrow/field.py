"""Ground-plane geometry shared by every other module.

Two coordinate frames appear throughout the package, both in centimetres:

* Camera footprint frame: x is lateral (positive to the robot's right),
  y is forward, origin on the robot centerline at the near edge of the
  rectangle the weed camera projects onto the ground.  Pixel row 0 is the
  far edge of that rectangle, the bottom pixel row is the near edge.
* World frame: x runs along the crop rows (the driving direction), y is
  the lateral offset across the field, positive to the right of row
  direction.  A robot heading of 0 degrees points along +x.

The footprint mapping is a flat-ground affine: pixel (0, 0) maps to
(-width/2, depth) and pixel (image_width-1, image_height-1) maps to
(+width/2, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class GroundPoint:
    """A point on the ground plane, in cm (see module docstring for frames)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"ground point must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "GroundPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class CameraFootprint:
    """Ground rectangle covered by the weed camera and its image resolution."""

    width: float = 96.0
    depth: float = 51.0
    image_width: int = 960
    image_height: int = 510

    def __post_init__(self):
        if self.width <= 0 or self.depth <= 0:
            raise DomainError("footprint dimensions must be strictly positive")
        if self.image_width < 2 or self.image_height < 2:
            raise DomainError("image dimensions must be at least 2x2 pixels")


def pixel_to_ground(px: float, py: float, fp: CameraFootprint) -> GroundPoint:
    """Map an image pixel to the camera footprint frame.

    Raises DomainError when the pixel lies outside the image.
    """
    if not (0 <= px <= fp.image_width - 1):
        raise DomainError(f"pixel column {px} outside [0, {fp.image_width - 1}]")
    if not (0 <= py <= fp.image_height - 1):
        raise DomainError(f"pixel row {py} outside [0, {fp.image_height - 1}]")
    x = -fp.width / 2.0 + px * fp.width / (fp.image_width - 1)
    y = fp.depth - py * fp.depth / (fp.image_height - 1)
    return GroundPoint(x, y)


def ground_to_pixel(p: GroundPoint, fp: CameraFootprint) -> tuple[int, int]:
    """Inverse of pixel_to_ground with round-half-up quantization.

    Raises DomainError when the point lies outside the footprint rectangle.
    """
    if abs(p.x) > fp.width / 2.0 or not (0.0 <= p.y <= fp.depth):
        raise DomainError(
            f"point ({p.x}, {p.y}) outside footprint "
            f"[-{fp.width / 2}, {fp.width / 2}] x [0, {fp.depth}]"
        )
    px = _round_half_up((p.x + fp.width / 2.0) * (fp.image_width - 1) / fp.width)
    py = _round_half_up((fp.depth - p.y) * (fp.image_height - 1) / fp.depth)
    return px, py


def footprint_center(fp: CameraFootprint) -> GroundPoint:
    """Center of the footprint: the turret reference point for all planners."""
    return GroundPoint(0.0, fp.depth / 2.0)
