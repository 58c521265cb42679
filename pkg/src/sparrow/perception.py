"""Synthetic field rendering and the classical crop-row pipeline.

Images are numpy arrays: RGB frames are (H, W, 3) uint8, gray images
(H, W) uint8, and binary masks (H, W) bool.  The pipeline segments
vegetation with a color index (excess green or the normalized green-red
difference), thresholds it, cleans the mask with a morphological opening,
and extracts the central row direction with a triangle scan over the
bottom region of interest.

The renderer replaces a recorded camera: it paints crop-row bands and
weed blobs on soil, with a configurable vanishing factor that narrows the
bands with distance, optional speckle noise, and an exact ground-truth
mask of the crop pixels.  Everything is deterministic under a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoRowError, ValidationError
from .scenario import Scenario

SOIL_COLOR = (120, 90, 60)
CROP_COLOR = (40, 190, 40)
WEED_COLOR = (55, 170, 60)

NOISE_PRESETS = {"none": 0.0, "low": 0.04, "field": 0.12}


@dataclass(frozen=True)
class RowDetection:
    """Central row line found by the triangle scan.

    The line runs from the bottom-center base midpoint to the chosen apex
    on the top edge; ``slope`` is pixel columns per pixel row toward the
    top.  ``delta_theta`` is the signed angle between that line and the
    vertical, in degrees, positive when the line leans right.
    """

    intercept_col: float
    slope: float
    delta_theta: float


def _noise_level(noise) -> float:
    if isinstance(noise, str):
        try:
            return NOISE_PRESETS[noise]
        except KeyError:
            raise DomainError(f"unknown noise preset {noise!r}") from None
    level = float(noise)
    if not (0.0 <= level <= 1.0):
        raise DomainError(f"noise level {level} outside [0, 1]")
    return level


def render_field(scenario: Scenario, view: str = "front", noise="none",
                 seed: int = 0, pose=None, vanish: float = 0.15
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Render the robot's forward camera view and its crop ground truth.

    ``pose`` is a navctl RobotPose in the world frame (None renders from
    the origin, aligned with the rows).  ``vanish`` in [0, 1) scales how
    strongly lateral distances shrink toward the far edge; 0 reproduces
    the flat affine footprint exactly.  ``noise`` is a preset name or a
    speckle probability.  Returns (RGB image, crop mask).
    """
    if view != "front":
        raise DomainError(f"unknown view {view!r}")
    if not (0.0 <= vanish < 1.0):
        raise DomainError(f"vanish factor {vanish} outside [0, 1)")
    level = _noise_level(noise)
    fp = scenario.footprint
    h_px, w_px = fp.image_height, fp.image_width

    if pose is None:
        px_x, px_y, heading = 0.0, 0.0, 0.0
    else:
        px_x, px_y, heading = pose.x, pose.y, pose.heading

    # Camera-frame ground coordinates of each pixel center (affine footprint),
    # then undo the vanishing squeeze to recover true lateral positions.
    cols = np.arange(w_px, dtype=float)
    rows_px = np.arange(h_px, dtype=float)
    x_aff = -fp.width / 2.0 + cols * fp.width / (w_px - 1)
    y_fwd = fp.depth - rows_px * fp.depth / (h_px - 1)
    squeeze = 1.0 - vanish * (y_fwd / fp.depth)
    x_lat = x_aff[None, :] / squeeze[:, None]
    y_fwd = np.broadcast_to(y_fwd[:, None], (h_px, w_px))

    # World position of every pixel given the robot pose.
    hr = math.radians(heading)
    wx = px_x + y_fwd * math.cos(hr) - x_lat * math.sin(hr)
    wy = px_y + y_fwd * math.sin(hr) + x_lat * math.cos(hr)

    crop = np.zeros((h_px, w_px), dtype=bool)
    for row in scenario.rows:
        crop |= np.abs(wy - row.offset) <= row.width / 2.0
    weed_mask = np.zeros((h_px, w_px), dtype=bool)
    for weed in scenario.weeds:
        weed_mask |= (wx - weed.point.x) ** 2 + (wy - weed.point.y) ** 2 \
            <= weed.radius ** 2

    img = np.empty((h_px, w_px, 3), dtype=np.uint8)
    img[:] = SOIL_COLOR
    img[crop] = CROP_COLOR
    img[weed_mask] = WEED_COLOR

    if level > 0.0:
        rng = np.random.default_rng(seed)
        speckle = rng.random((h_px, w_px)) < level
        colors = rng.integers(0, 256, size=(h_px, w_px, 3), dtype=np.uint8)
        img = np.where(speckle[:, :, None], colors, img)
    return img, crop


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with kernel radius ceil(3 sigma) and edge clamp.

    sigma = 0 is the identity.  Works on gray (H, W) and RGB (H, W, 3).
    """
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return img.copy()
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=float)
    kernel = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()

    work = img.astype(np.float64)
    for axis in (0, 1):
        pad = [(0, 0)] * work.ndim
        pad[axis] = (radius, radius)
        padded = np.pad(work, pad, mode="edge")
        out = np.zeros_like(work)
        for k, weight in enumerate(kernel):
            sl = [slice(None)] * work.ndim
            sl[axis] = slice(k, k + img.shape[axis])
            out += weight * padded[tuple(sl)]
        work = out
    return np.clip(np.rint(work), 0, 255).astype(np.uint8)


def excess_green(img: np.ndarray) -> np.ndarray:
    """Excess-green index 2G - R - B, rescaled from [-510, 510] to 8 bits."""
    r = img[:, :, 0].astype(np.int32)
    g = img[:, :, 1].astype(np.int32)
    b = img[:, :, 2].astype(np.int32)
    v = 2 * g - r - b
    return np.clip(np.rint((v + 510) * (255.0 / 1020.0)), 0, 255).astype(np.uint8)


def ndi(img: np.ndarray) -> np.ndarray:
    """Normalized green-red difference (G - R) / (G + R), mapped to 8 bits."""
    r = img[:, :, 0].astype(np.float64)
    g = img[:, :, 1].astype(np.float64)
    v = (g - r) / (g + r + 1e-9)
    return np.clip(np.rint((v + 1.0) * 127.5), 0, 255).astype(np.uint8)


def otsu_threshold(gray: np.ndarray) -> int:
    """Threshold maximizing between-class variance for mask = gray >= t.

    Ties break toward the lowest threshold.
    """
    hist = np.bincount(gray.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    if total == 0:
        raise DomainError("empty image")
    # class 0 is gray < t, class 1 is gray >= t, for t in 0..255
    cum = np.cumsum(hist)
    cum_val = np.cumsum(hist * np.arange(256))
    w0 = np.concatenate(([0.0], cum[:-1]))        # pixels below t
    s0 = np.concatenate(([0.0], cum_val[:-1]))
    w1 = total - w0
    s1 = cum_val[-1] - s0
    with np.errstate(invalid="ignore", divide="ignore"):
        mu0 = np.where(w0 > 0, s0 / w0, 0.0)
        mu1 = np.where(w1 > 0, s1 / w1, 0.0)
    between = np.where((w0 > 0) & (w1 > 0), w0 * w1 * (mu0 - mu1) ** 2, 0.0)
    return int(np.argmax(between))


def binarize(gray: np.ndarray, method: str = "otsu",
             threshold: int | None = None) -> np.ndarray:
    """Threshold a gray image: pixels >= t become foreground.

    method "fixed" uses the supplied threshold; "otsu" picks the
    between-class-variance maximizer.
    """
    if method == "fixed":
        if threshold is None:
            raise DomainError("fixed binarization needs a threshold")
        t = threshold
    elif method == "otsu":
        t = otsu_threshold(gray)
    else:
        raise DomainError(f"unknown binarization method {method!r}")
    return gray >= t


def _erode(mask: np.ndarray, kernel: int) -> np.ndarray:
    r = kernel // 2
    padded = np.pad(mask, r, constant_values=False)
    h, w = mask.shape
    out = np.ones_like(mask)
    for dy in range(kernel):
        for dx in range(kernel):
            out &= padded[dy:dy + h, dx:dx + w]
    return out


def _dilate(mask: np.ndarray, kernel: int) -> np.ndarray:
    r = kernel // 2
    padded = np.pad(mask, r, constant_values=False)
    h, w = mask.shape
    out = np.zeros_like(mask)
    for dy in range(kernel):
        for dx in range(kernel):
            out |= padded[dy:dy + h, dx:dx + w]
    return out


def morphology(mask: np.ndarray, op: str, kernel: int = 3,
               iterations: int = 1) -> np.ndarray:
    """Binary erosion or dilation with a square kernel and zero padding."""
    if kernel < 1 or kernel % 2 == 0:
        raise DomainError(f"kernel must be odd and >= 1, got {kernel}")
    if iterations < 0:
        raise DomainError(f"iterations must be >= 0, got {iterations}")
    if op not in ("erode", "dilate"):
        raise DomainError(f"unknown morphology op {op!r}")
    out = mask.copy()
    fn = _erode if op == "erode" else _dilate
    for _ in range(iterations):
        out = fn(out, kernel)
    return out


def triangle_scan(mask: np.ndarray, base_width: float | None = None) -> RowDetection:
    """Find the row direction by sweeping triangles over the mask.

    The base is fixed at the bottom center (width defaults to a third of
    the image); one candidate triangle per apex column along the top edge.
    All candidates share the same area, so the best coverage ratio is the
    one containing the most foreground; ties break toward the lowest apex
    column.  Raises NoRowError when no triangle contains any foreground.
    """
    h, w = mask.shape
    if h < 2 or w < 1:
        raise DomainError(f"mask too small to scan: {mask.shape}")
    if not mask.any():
        raise NoRowError("mask contains no foreground")
    if base_width is None:
        base_width = w / 3.0
    if not (0 < base_width <= w):
        raise DomainError(f"base width {base_width} outside (0, {w}]")

    base_mid = (w - 1) / 2.0
    base_left = base_mid - base_width / 2.0
    base_right = base_mid + base_width / 2.0

    # t goes 0 at the bottom row to 1 at the top row.
    t = (h - 1 - np.arange(h, dtype=float)) / (h - 1)
    apex = np.arange(w, dtype=float)
    left = base_left * (1.0 - t)[:, None] + t[:, None] * apex[None, :]
    right = base_right * (1.0 - t)[:, None] + t[:, None] * apex[None, :]
    lo = np.clip(np.ceil(left), 0, w).astype(np.int64)
    hi = np.clip(np.floor(right) + 1, 0, w).astype(np.int64)
    hi = np.maximum(hi, lo)

    prefix = np.zeros((h, w + 1), dtype=np.int64)
    np.cumsum(mask, axis=1, out=prefix[:, 1:])
    row_idx = np.arange(h)[:, None]
    counts = (prefix[row_idx, hi] - prefix[row_idx, lo]).sum(axis=0)

    best = int(np.argmax(counts))
    if counts[best] == 0:
        raise NoRowError("no candidate triangle contains foreground")
    slope = (best - base_mid) / (h - 1)
    delta_theta = math.degrees(math.atan2(best - base_mid, float(h - 1)))
    return RowDetection(intercept_col=base_mid, slope=slope, delta_theta=delta_theta)


def iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two masks; two empty masks agree fully."""
    if a.shape != b.shape:
        raise ValidationError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)


@dataclass(frozen=True)
class PipelineParams:
    """Knobs of the default segmentation and row-extraction chain."""

    sigma: float = 1.5
    index: str = "exg"  # "exg" or "ndi"
    method: str = "otsu"
    threshold: int | None = None
    open_kernel: int = 3
    open_iterations: int = 1
    roi_fraction: float = 0.6
    base_width: float | None = None


def run_pipeline(img: np.ndarray, params: PipelineParams | None = None
                 ) -> tuple[np.ndarray, RowDetection]:
    """Blur, index, threshold, open, then triangle-scan the bottom ROI.

    Returns the full-frame cleaned vegetation mask and the row detection.
    The region-of-interest crop applies only to the row-direction stage;
    the returned mask covers the whole frame so it can be scored against
    full ground truth.  A NoRowError from the scan propagates.
    """
    p = params or PipelineParams()
    blurred = gaussian_blur(img, p.sigma)
    if p.index == "exg":
        gray = excess_green(blurred)
    elif p.index == "ndi":
        gray = ndi(blurred)
    else:
        raise DomainError(f"unknown index {p.index!r}")
    mask = binarize(gray, method=p.method, threshold=p.threshold)
    mask = morphology(mask, "erode", p.open_kernel, p.open_iterations)
    mask = morphology(mask, "dilate", p.open_kernel, p.open_iterations)
    roi_rows = max(2, int(round(mask.shape[0] * p.roi_fraction)))
    roi = mask[mask.shape[0] - roi_rows:, :]
    detection = triangle_scan(roi, base_width=p.base_width)
    return mask, detection


def synthetic_corpus(count: int, noise="field", seed: int = 0,
                     footprint=None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded corpus of rendered frames with ground truth, for evaluation.

    Scene layout varies per image: row count, widths, offsets, a few small
    off-row weeds, and a mild pose perturbation.
    """
    from .field import CameraFootprint, GroundPoint
    from .navctl import RobotPose
    from .scenario import CropRow, Scenario, Weed

    fp = footprint or CameraFootprint()
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        n_rows = int(rng.integers(1, 4))
        spacing = float(rng.uniform(26.0, 34.0))
        rows = []
        for k in range(n_rows):
            offset = (k - (n_rows - 1) / 2.0) * spacing + float(rng.uniform(-3.0, 3.0))
            rows.append(CropRow(offset=offset, width=float(rng.uniform(8.0, 13.0))))
        weeds = []
        for _ in range(int(rng.integers(0, 3))):
            wy = float(rng.uniform(-fp.width / 2 + 6, fp.width / 2 - 6))
            if any(abs(wy - r.offset) < r.width / 2 + 3 for r in rows):
                continue  # keep weeds off-row
            weeds.append(Weed(GroundPoint(float(rng.uniform(5, fp.depth - 5)), wy),
                              float(rng.uniform(2.0, 4.0))))
        sc = Scenario(footprint=fp, rows=tuple(rows), weeds=tuple(weeds))
        pose = RobotPose(x=0.0, y=float(rng.uniform(-2.0, 2.0)),
                         heading=float(rng.uniform(-5.0, 5.0)))
        img, truth = render_field(sc, noise=noise, seed=int(rng.integers(0, 2 ** 31)),
                                  pose=pose)
        corpus.append((img, truth))
    return corpus
