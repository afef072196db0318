"""Exception hierarchy shared by every stage.

Each error carries the stage tag the CLI prints in front of the message.
"""

from __future__ import annotations

from typing import Iterable, List, Tuple


class UfcsrError(Exception):
    stage = "ufcsr"

    def __init__(self, *args, stage: str | None = None):
        super().__init__(*args)
        if stage is not None:
            self.stage = stage

    def __str__(self) -> str:
        return f"[{self.stage}] {super().__str__()}"

    def __reduce__(self):
        # keeps per-instance stage tags and subclass state across worker processes
        return _restore, (type(self), self.args, self.__dict__.copy())


def _restore(cls, args, state):
    err = Exception.__new__(cls)
    err.args = args
    err.__dict__.update(state)
    return err


# palette
class PaletteRangeError(UfcsrError, ValueError):
    stage = "palette"


class NoIgnoreColorError(UfcsrError):
    stage = "palette"


# meshkit
class MeshFormatError(UfcsrError):
    stage = "meshkit"


class UnwrapError(UfcsrError):
    stage = "meshkit"


class OverlapError(UfcsrError):
    stage = "meshkit"

    def __init__(self, texels: Iterable[Tuple[int, int]], limit: int = 8):
        self.texels: List[Tuple[int, int]] = list(texels)
        shown = ", ".join(f"({x},{y})" for x, y in self.texels[:limit])
        more = f" (+{len(self.texels) - limit} more)" if len(self.texels) > limit else ""
        super().__init__(f"{len(self.texels)} texel(s) owned by more than one triangle: {shown}{more}")


class ConsistencyError(UfcsrError):
    stage = "meshkit"


# scene
class TrajectoryRangeError(UfcsrError, ValueError):
    stage = "scene"


class DegenerateLookError(UfcsrError):
    stage = "scene"


class ScenarioConfigError(UfcsrError):
    stage = "scene"


# raster
class GeometryError(UfcsrError):
    stage = "raster"


class TilingError(UfcsrError):
    stage = "raster"


# capture
class ManifestError(UfcsrError):
    stage = "capture"


class StorageError(UfcsrError):
    stage = "capture"


# analyze
class EmptyDataError(UfcsrError):
    stage = "analyze"


class StrictColorError(UfcsrError):
    stage = "analyze"


class PlasmaRangeError(UfcsrError, ValueError):
    stage = "analyze"


# oracle
class OwnershipError(UfcsrError):
    stage = "oracle"


class SingularMappingError(UfcsrError):
    stage = "oracle"


class OracleScaleError(UfcsrError):
    stage = "oracle"
