"""Keyframed subject trajectories.

Yaw is the heading in the ground plane, counter-clockwise from +x. Each keyframe
except the last names the phase of the segment that leaves it:

- cruise: linear position and shortest-arc yaw blend
- turn: circular arc tangent to the start heading and ending at the next keyframe
- decelerate: quadratic ease-out, velocity reaches zero at the next keyframe
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence

import numpy as np

from ...core.errors import ScenarioConfigError, TrajectoryRangeError

log = logging.getLogger(__name__)

TIME_EPS = 1e-9


class Phase(str, Enum):
    CRUISE = "cruise"
    TURN = "turn"
    DECELERATE = "decelerate"


@dataclass(frozen=True)
class Keyframe:
    t: float
    position: tuple[float, float, float]
    yaw: float
    phase: Phase = Phase.CRUISE


@dataclass(frozen=True)
class Pose:
    position: np.ndarray
    yaw: float


def wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


class Trajectory:
    def __init__(self, keyframes: Sequence[Keyframe]):
        if len(keyframes) < 2:
            raise ScenarioConfigError("a trajectory needs at least two keyframes")
        times = [k.t for k in keyframes]
        if abs(times[0]) > TIME_EPS:
            raise ScenarioConfigError(f"first keyframe must be at t=0, got {times[0]}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioConfigError("keyframe times must be strictly increasing")
        self.keyframes: List[Keyframe] = list(keyframes)
        self._times = times
        for a, b in zip(self.keyframes, self.keyframes[1:]):
            if a.phase is Phase.TURN:
                alpha = self._arc_half_angle(a, b)
                if math.pi - abs(alpha) < 1e-6:
                    raise ScenarioConfigError(
                        f"turn from t={a.t:.3f} ends directly behind its start heading; no arc is tangent to it"
                    )
                end_yaw = a.yaw + 2.0 * alpha
                if abs(wrap_angle(end_yaw - b.yaw)) > 1e-3:
                    log.warning(
                        "turn from t=%.3f ends heading %.2f deg, keyframe says %.2f deg",
                        a.t, math.degrees(end_yaw), math.degrees(b.yaw),
                    )

    @property
    def duration(self) -> float:
        return self._times[-1]

    @staticmethod
    def _arc_half_angle(a: Keyframe, b: Keyframe) -> float:
        dx = b.position[0] - a.position[0]
        dy = b.position[1] - a.position[1]
        if dx == 0.0 and dy == 0.0:
            return 0.0
        return wrap_angle(math.atan2(dy, dx) - a.yaw)

    def _segment(self, t: float) -> int:
        i = bisect.bisect_right(self._times, t) - 1
        return min(max(i, 0), len(self._times) - 2)


def _lerp(p0: np.ndarray, p1: np.ndarray, s: float) -> np.ndarray:
    return p0 + (p1 - p0) * s


def evaluate_pose(traj: Trajectory, t: float) -> Pose:
    if t < -TIME_EPS or t > traj.duration + TIME_EPS:
        raise TrajectoryRangeError(f"t={t} outside [0, {traj.duration}]")
    t = min(max(t, 0.0), traj.duration)
    i = traj._segment(t)
    a, b = traj.keyframes[i], traj.keyframes[i + 1]
    tau = (t - a.t) / (b.t - a.t)
    p0 = np.asarray(a.position, dtype=np.float64)
    p1 = np.asarray(b.position, dtype=np.float64)

    if a.phase is Phase.DECELERATE:
        s = 1.0 - (1.0 - tau) ** 2
        return Pose(_lerp(p0, p1, s), a.yaw + wrap_angle(b.yaw - a.yaw) * s)

    if a.phase is Phase.TURN:
        alpha = Trajectory._arc_half_angle(a, b)
        if abs(alpha) > 1e-9:
            chord = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
            radius = chord / (2.0 * math.sin(alpha))  # signed: positive turns left
            theta = 2.0 * alpha * tau
            pos = np.array([
                p0[0] + radius * (math.sin(a.yaw + theta) - math.sin(a.yaw)),
                p0[1] + radius * (math.cos(a.yaw) - math.cos(a.yaw + theta)),
                p0[2] + (p1[2] - p0[2]) * tau,
            ])
            if tau == 1.0:
                pos = p1.copy()
            return Pose(pos, a.yaw + theta)
        # straight chord along the heading: degenerate arc
        return Pose(_lerp(p0, p1, tau), a.yaw)

    return Pose(_lerp(p0, p1, tau), a.yaw + wrap_angle(b.yaw - a.yaw) * tau)


def rotation_z(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def place(points: np.ndarray, pose: Pose) -> np.ndarray:
    """Model-space points (..., 3) into world space under `pose`."""
    return points @ rotation_z(pose.yaw).T + pose.position
