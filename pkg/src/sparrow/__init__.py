"""Deterministic weed spot-spraying robot simulator.

A numpy library modeling the full pipeline of a vision-guided spot
sprayer: camera footprint geometry, synthetic crop-row perception,
proportional row following, weed-triggered mission interrupts, turret
trajectory planning with exact and heuristic solvers, and sprayer
kinematics with a measured spread model.
"""

from .errors import (DomainError, NoRowError, OutOfReachError, ScenarioError,
                     SizeError, SparrowError, ValidationError)
from .field import (CameraFootprint, GroundPoint, footprint_center,
                    ground_to_pixel, pixel_to_ground)
from .scenario import (ControllerConfig, CropRow, DetectorConfig, Scenario,
                       Weed, load_scenario, serialize_scenario, with_seed)
from .planner import (SprayPlan, build_distance_matrix, evaluate_planners,
                      phi_score, plan_christofides, plan_hybrid,
                      plan_nearest_neighbor, plan_optimal_heldkarp,
                      random_instance, tour_length)
from .sprayer import (SprayerConfig, SprayEvent, SprayLog, TurretAngles,
                      aim_angles, execute_plan, ground_point_of_angles,
                      spread_radius)
from .perception import (PipelineParams, RowDetection, binarize, excess_green,
                         gaussian_blur, iou, morphology, ndi, otsu_threshold,
                         render_field, run_pipeline, synthetic_corpus,
                         triangle_scan)
from .navctl import (RobotPose, RowFollowResult, Twist, analytic_delta_theta,
                     central_row, control_step, integrate_pose,
                     normalize_heading, run_row_following)
from .coordinator import (Detection, MissionEvent, MissionLimits,
                          MissionReport, MissionState, detect_weeds_simulated,
                          run_mission, transition, write_report)

__version__ = "0.1.0"
