from .geometry import box_triangles, load_triangles
from .rig import (
    EYE_HEIGHT,
    HFOV_DEG,
    INTERPUPILLARY_DISTANCE,
    Camera,
    CameraRig,
    Orientation,
    eye_cameras,
    head_orientation,
)
from .scenario import Occluder, Scenario, ScenarioConfig, build_scenario, load_scenario, load_scenario_config
from .schedule import EYES, FrameSchedule, frame_schedule
from .trajectory import Keyframe, Phase, Pose, Trajectory, evaluate_pose, place

__all__ = [
    "EYES", "EYE_HEIGHT", "HFOV_DEG", "INTERPUPILLARY_DISTANCE",
    "Camera", "CameraRig", "FrameSchedule", "Keyframe", "Occluder", "Orientation", "Phase", "Pose",
    "Scenario", "ScenarioConfig", "Trajectory",
    "box_triangles", "build_scenario", "evaluate_pose", "eye_cameras", "frame_schedule",
    "head_orientation", "load_scenario", "load_scenario_config", "load_triangles", "place",
]
