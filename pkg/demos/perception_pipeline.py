"""
Crop-row segmentation stage by stage
====================================

Renders a noisy three-row field, then walks the frame through the
pipeline: Gaussian blur, excess-green index, Otsu threshold, opening,
and the triangle scan that extracts the central row direction.  Every
stage is written to demos/output/perception/ as PPM/PGM so the
progression can be inspected with any image viewer.
"""

import os

from sparrow import (CropRow, GroundPoint, RobotPose, Scenario, Weed,
                     binarize, excess_green, gaussian_blur, iou, morphology,
                     render_field, triangle_scan)
from sparrow.netpbm import write_pgm, write_ppm
from sparrow.perception import otsu_threshold

out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                       "output", "perception")
os.makedirs(out_dir, exist_ok=True)


def save(name, data, writer):
    path = os.path.join(out_dir, name)
    with open(path, "wb") as fh:
        fh.write(writer(data))
    print(f"  wrote {path}")


scenario = Scenario(
    rows=(CropRow(0.0, 10.0), CropRow(-30.0, 10.0), CropRow(30.0, 10.0)),
    weeds=(Weed(GroundPoint(30.0, -17.0), 3.0), Weed(GroundPoint(40.0, 16.0), 2.5)),
)
pose = RobotPose(x=0.0, y=1.0, heading=-4.0)  # slightly off row, turned left

print("rendering a speckled frame from a perturbed pose")
img, truth = render_field(scenario, noise="field", seed=5, pose=pose)
save("00_input.ppm", img, write_ppm)
save("01_truth.pgm", truth, write_pgm)

print("blur: radius ceil(3 sigma) separable Gaussian")
blurred = gaussian_blur(img, 1.5)
save("02_blurred.ppm", blurred, write_ppm)

print("excess green: 2G - R - B rescaled to 8 bits")
exg = excess_green(blurred)
save("03_excess_green.pgm", exg, write_pgm)

t = otsu_threshold(exg)
print(f"otsu threshold over the index image: {t}")
mask = binarize(exg, method="otsu")
save("04_thresholded.pgm", mask, write_pgm)

print("opening: one erode + one dilate with a 3x3 kernel")
opened = morphology(morphology(mask, "erode", 3, 1), "dilate", 3, 1)
save("05_opened.pgm", opened, write_pgm)

score = iou(opened, truth)
print(f"IOU against ground truth: {score:.4f}")

detection = triangle_scan(opened[opened.shape[0] * 2 // 5:, :])
print(f"triangle scan on the bottom ROI: delta_theta = "
      f"{detection.delta_theta:+.2f} deg (robot heading was {pose.heading:+.1f}, "
      f"so the controller will steer by alpha * {detection.delta_theta:+.2f})")
