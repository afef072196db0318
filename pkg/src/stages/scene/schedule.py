from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

EYES = ("L", "R")


@dataclass(frozen=True)
class FrameSchedule:
    times: List[float]
    rate: float
    tiles_per_capture: int = 25

    @property
    def frames(self) -> int:
        return len(self.times)

    @property
    def captures(self) -> int:
        return self.frames * len(EYES)

    @property
    def tile_files(self) -> int:
        return self.captures * self.tiles_per_capture


def frame_schedule(rate: float, duration: float, tiles_per_capture: int = 25) -> FrameSchedule:
    """t_k = k / rate for k = 0..floor(duration * rate), endpoint included."""
    if rate <= 0 or duration <= 0:
        raise ValueError("capture rate and duration must be positive")
    n = int(math.floor(duration * rate + 1e-9))
    return FrameSchedule(times=[k / rate for k in range(n + 1)], rate=rate, tiles_per_capture=tiles_per_capture)
