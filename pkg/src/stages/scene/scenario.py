"""Declarative scenario files (YAML) and their evaluated form."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ...core.errors import ScenarioConfigError, UfcsrError
from ..meshkit import LabeledMesh, PartMap, load_mesh
from . import rig as rig_defaults
from .geometry import box_triangles, load_triangles
from .rig import Camera, CameraRig, eye_cameras
from .schedule import FrameSchedule, frame_schedule
from .trajectory import Keyframe, Phase, Pose, Trajectory, evaluate_pose, place, rotation_z

log = logging.getLogger(__name__)

Vec3 = Tuple[float, float, float]


class KeyframeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    t: float
    position: Vec3
    yaw_deg: float = 0.0
    phase: Phase = Phase.CRUISE


class TrajectoryConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    keyframes: List[KeyframeConfig] = Field(min_length=2)


class SubjectConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    mesh: Path
    parts: Optional[Path] = None
    look_at_offset: Vec3 = (0.0, 0.0, 0.0)
    trajectory: TrajectoryConfig


class BoxConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    center: Vec3
    size: Vec3
    yaw_deg: float = 0.0


class OccluderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str = "occluder"
    box: Optional[BoxConfig] = None
    mesh: Optional[Path] = None
    translate: Vec3 = (0.0, 0.0, 0.0)
    yaw_deg: float = 0.0
    scale: float = 1.0

    @model_validator(mode="after")
    def _one_source(self) -> "OccluderConfig":
        if (self.box is None) == (self.mesh is None):
            raise ValueError("an occluder needs exactly one of `box` or `mesh`")
        return self


class RigConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    head: Vec3 = (0.0, 0.0, 0.0)
    eye_height: float = rig_defaults.EYE_HEIGHT
    ipd: float = rig_defaults.INTERPUPILLARY_DISTANCE
    hfov_deg: float = Field(default=rig_defaults.HFOV_DEG, gt=0.0, lt=180.0)
    width: int = rig_defaults.EYE_WIDTH
    height: int = rig_defaults.EYE_HEIGHT_PX
    tiles: Tuple[int, int] = rig_defaults.TILE_GRID


class CaptureConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rate: float = Field(default=60.0, gt=0.0)
    duration: Optional[float] = Field(default=None, gt=0.0)


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    description: str = ""
    subject: SubjectConfig
    occluders: List[OccluderConfig] = []
    rig: RigConfig = RigConfig()
    capture: CaptureConfig = CaptureConfig()


@dataclass
class Occluder:
    name: str
    triangles: np.ndarray  # (N, 3, 3) world space


@dataclass
class Scenario:
    id: str
    subject: Optional[LabeledMesh]
    trajectory: Trajectory
    rig: CameraRig
    rate: float
    duration: float
    occluders: List[Occluder] = field(default_factory=list)
    mesh_path: Optional[Path] = None
    parts_path: Optional[Path] = None
    source: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ScenarioConfigError("capture rate must be positive")
        if abs(self.duration - self.trajectory.duration) > 1e-9:
            raise ScenarioConfigError(
                f"capture duration {self.duration} differs from trajectory duration {self.trajectory.duration}"
            )

    def pose(self, t: float) -> Pose:
        return evaluate_pose(self.trajectory, t)

    def cameras(self, t: float) -> Tuple[Camera, Camera]:
        return eye_cameras(self.rig, self.pose(t).position)

    def schedule(self) -> FrameSchedule:
        rows, cols = self.rig.tiles
        return frame_schedule(self.rate, self.duration, rows * cols)

    def subject_triangles(self, t: float) -> np.ndarray:
        """(T, 3, 3) world-space subject triangles at time t."""
        if self.subject is None or self.subject.triangle_count == 0:
            return np.zeros((0, 3, 3))
        return place(self.subject.corners(), self.pose(t))

    def occluder_triangles(self) -> np.ndarray:
        if not self.occluders:
            return np.zeros((0, 3, 3))
        return np.concatenate([o.triangles for o in self.occluders])

    def with_scale(self, scale: int) -> "Scenario":
        if scale == 1:
            return self
        return Scenario(
            id=self.id, subject=self.subject, trajectory=self.trajectory, rig=self.rig.scaled(scale),
            rate=self.rate, duration=self.duration, occluders=self.occluders,
            mesh_path=self.mesh_path, parts_path=self.parts_path, source=self.source,
        )


def _resolve(base: Path, p: Optional[Path]) -> Optional[Path]:
    if p is None:
        return None
    return p if p.is_absolute() else (base / p).resolve()


def _build_occluder(cfg: OccluderConfig, base: Path) -> Occluder:
    if cfg.box is not None:
        tris = box_triangles(cfg.box.center, cfg.box.size, cfg.box.yaw_deg)
    else:
        tris = load_triangles(_resolve(base, cfg.mesh)) * cfg.scale
        tris = tris @ rotation_z(math.radians(cfg.yaw_deg)).T + np.asarray(cfg.translate)
    return Occluder(name=cfg.name, triangles=tris)


def build_scenario(cfg: ScenarioConfig, base: Path, load_subject: bool = True) -> Scenario:
    traj = Trajectory([
        Keyframe(t=k.t, position=tuple(k.position), yaw=math.radians(k.yaw_deg), phase=k.phase)
        for k in cfg.subject.trajectory.keyframes
    ])
    mesh_path = _resolve(base, cfg.subject.mesh)
    parts_path = _resolve(base, cfg.subject.parts)
    subject = load_mesh(mesh_path, PartMap.load(parts_path)) if load_subject else None
    rig = CameraRig(
        head=np.asarray(cfg.rig.head, dtype=np.float64),
        eye_height=cfg.rig.eye_height,
        ipd=cfg.rig.ipd,
        hfov_deg=cfg.rig.hfov_deg,
        width=cfg.rig.width,
        height=cfg.rig.height,
        tiles=tuple(cfg.rig.tiles),
        look_at_offset=np.asarray(cfg.subject.look_at_offset, dtype=np.float64),
    )
    return Scenario(
        id=cfg.id,
        subject=subject,
        trajectory=traj,
        rig=rig,
        rate=cfg.capture.rate,
        duration=cfg.capture.duration if cfg.capture.duration is not None else traj.duration,
        occluders=[_build_occluder(o, base) for o in cfg.occluders],
        mesh_path=mesh_path,
        parts_path=parts_path,
    )


def load_scenario_config(path: Path) -> ScenarioConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        return ScenarioConfig.model_validate(raw)
    except (OSError, yaml.YAMLError, ValidationError) as e:
        raise ScenarioConfigError(f"bad scenario file {path}: {e}") from e


def load_scenario(path: Path, load_subject: bool = True) -> Scenario:
    path = Path(path)
    cfg = load_scenario_config(path)
    try:
        sc = build_scenario(cfg, path.parent, load_subject=load_subject)
    except UfcsrError:
        raise
    except (ValueError, OSError) as e:
        raise ScenarioConfigError(f"{path}: {e}") from e
    sc.source = path
    log.info("scenario %s: %.2f s at %g fps, %d occluder(s)", sc.id, sc.duration, sc.rate, len(sc.occluders))
    return sc
