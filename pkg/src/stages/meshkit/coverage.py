"""Pixel-center coverage rule shared by the UV baker and the screen rasterizer.

Edge functions are evaluated with a canonical vertex order so that the two
triangles sharing an edge see exactly negated values, and a point lying on an
edge belongs to exactly one of them.
"""

from __future__ import annotations

from numba import njit


@njit(cache=True, inline="always")
def edge(ax, ay, bx, by, px, py):
    if ax > bx or (ax == bx and ay > by):
        return -((ax - bx) * (py - by) - (ay - by) * (px - bx))
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


@njit(cache=True, inline="always")
def owns_edge(ax, ay, bx, by):
    """Tie rule for a point exactly on edge a->b of a positively oriented triangle."""
    dy = by - ay
    return dy > 0.0 or (dy == 0.0 and bx - ax > 0.0)


@njit(cache=True, inline="always")
def covers(w, ax, ay, bx, by):
    return w > 0.0 or (w == 0.0 and owns_edge(ax, ay, bx, by))
