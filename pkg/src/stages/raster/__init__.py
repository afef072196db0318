from .frame import Frame, Tile, join_tiles, split_tiles
from .renderer import Renderer, backface_and_clip, render_frame

__all__ = ["Frame", "Renderer", "Tile", "backface_and_clip", "join_tiles", "render_frame", "split_tiles"]
