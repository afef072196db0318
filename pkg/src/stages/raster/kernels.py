"""numba kernels for the unlit z-buffer renderer.

Camera space is x right, y up, z forward. That frame is left-handed, so a
triangle that is counter-clockwise as seen by the eye has (v1-v0)x(v2-v0) . v0 > 0
in camera coordinates.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..meshkit.coverage import covers, edge


@njit(cache=True)
def _emit(out_tris, out_uvs, out_ids, m, p, q, r, pu, qu, ru, tid):
    for j in range(3):
        out_tris[m, 0, j] = p[j]
        out_tris[m, 1, j] = q[j]
        out_tris[m, 2, j] = r[j]
    for j in range(2):
        out_uvs[m, 0, j] = pu[j]
        out_uvs[m, 1, j] = qu[j]
        out_uvs[m, 2, j] = ru[j]
    out_ids[m] = tid
    return m + 1


@njit(cache=True)
def cull_and_clip(tris, uvs, ids, near, out_tris, out_uvs, out_ids):
    """Back-face cull subject triangles, then clip against z = near.

    Occluders (ids < 0) are two-sided and never culled. Outputs hold up to
    2 triangles per input.
    """
    m = 0
    poly = np.empty((4, 3))
    poly_uv = np.empty((4, 2))
    for k in range(tris.shape[0]):
        v0 = tris[k, 0]
        v1 = tris[k, 1]
        v2 = tris[k, 2]
        e1 = v1 - v0
        e2 = v2 - v0
        nx = e1[1] * e2[2] - e1[2] * e2[1]
        ny = e1[2] * e2[0] - e1[0] * e2[2]
        nz = e1[0] * e2[1] - e1[1] * e2[0]
        if ids[k] >= 0 and nx * v0[0] + ny * v0[1] + nz * v0[2] <= 0.0:
            continue
        n_in = 0
        for i in range(3):
            if tris[k, i, 2] >= near:
                n_in += 1
        if n_in == 0:
            continue
        if n_in == 3:
            m = _emit(out_tris, out_uvs, out_ids, m, v0, v1, v2, uvs[k, 0], uvs[k, 1], uvs[k, 2], ids[k])
            continue
        n = 0
        for i in range(3):
            cur = tris[k, i]
            nxt = tris[k, (i + 1) % 3]
            cur_in = cur[2] >= near
            nxt_in = nxt[2] >= near
            if cur_in:
                poly[n] = cur
                poly_uv[n] = uvs[k, i]
                n += 1
            if cur_in != nxt_in:
                s = (near - cur[2]) / (nxt[2] - cur[2])
                poly[n] = cur + s * (nxt - cur)
                poly[n, 2] = near
                poly_uv[n] = uvs[k, i] + s * (uvs[k, (i + 1) % 3] - uvs[k, i])
                n += 1
        for i in range(2, n):
            m = _emit(out_tris, out_uvs, out_ids, m, poly[0], poly[i - 1], poly[i],
                      poly_uv[0], poly_uv[i - 1], poly_uv[i], ids[k])
    return m


@njit(cache=True)
def _snap(owner, size, tid, fx, fy, tx, ty):
    """Nearest texel owned by `tid` in the 3x3 block around (tx, ty); (-1, -1) if none."""
    best = -1.0
    bx = -1
    by = -1
    for dy in range(-1, 2):
        y = ty + dy
        if y < 0 or y >= size:
            continue
        for dx in range(-1, 2):
            x = tx + dx
            if x < 0 or x >= size:
                continue
            if owner[y, x] != tid:
                continue
            d = (x + 0.5 - fx) ** 2 + (y + 0.5 - fy) ** 2
            if best < 0.0 or d < best:
                best = d
                bx = x
                by = y
    return bx, by


@njit(cache=True)
def rasterize(tris, uvs, ids, n_tris, focal, near, far, texture, owner, use_owner, ignore, color, depth):
    """Z-buffered pixel-center rasterization into `color` (uint32) and `depth` (float32).

    ids < 0 mark flat ignore-color geometry; ids >= 0 sample `texture` at the
    perspective-correct UV, truncated to a texel and, with `use_owner`, snapped
    to a texel owned by that triangle.
    """
    height, width = color.shape
    size = texture.shape[0]
    cx0 = width * 0.5
    cy0 = height * 0.5
    dz_a = (far + near) / (far - near)
    dz_b = 2.0 * far * near / (far - near)
    for k in range(n_tris):
        iza = 1.0 / tris[k, 0, 2]
        izb = 1.0 / tris[k, 1, 2]
        izc = 1.0 / tris[k, 2, 2]
        ax = cx0 + focal * tris[k, 0, 0] * iza
        ay = cy0 - focal * tris[k, 0, 1] * iza
        bx = cx0 + focal * tris[k, 1, 0] * izb
        by = cy0 - focal * tris[k, 1, 1] * izb
        cx = cx0 + focal * tris[k, 2, 0] * izc
        cy = cy0 - focal * tris[k, 2, 1] * izc
        ua, va = uvs[k, 0, 0], uvs[k, 0, 1]
        ub, vb = uvs[k, 1, 0], uvs[k, 1, 1]
        uc, vc = uvs[k, 2, 0], uvs[k, 2, 1]
        area = edge(ax, ay, bx, by, cx, cy)
        if area == 0.0 or not math.isfinite(area):
            continue
        if area < 0.0:
            bx, cx = cx, bx
            by, cy = cy, by
            izb, izc = izc, izb
            ub, uc = uc, ub
            vb, vc = vc, vb
            area = -area
        x0 = max(0, int(math.ceil(min(ax, bx, cx) - 0.5)))
        x1 = min(width - 1, int(math.floor(max(ax, bx, cx) - 0.5)))
        y0 = max(0, int(math.ceil(min(ay, by, cy) - 0.5)))
        y1 = min(height - 1, int(math.floor(max(ay, by, cy) - 0.5)))
        tid = ids[k]
        for y in range(y0, y1 + 1):
            py = y + 0.5
            for x in range(x0, x1 + 1):
                px = x + 0.5
                w0 = edge(bx, by, cx, cy, px, py)
                if not covers(w0, bx, by, cx, cy):
                    continue
                w1 = edge(cx, cy, ax, ay, px, py)
                if not covers(w1, cx, cy, ax, ay):
                    continue
                w2 = edge(ax, ay, bx, by, px, py)
                if not covers(w2, ax, ay, bx, by):
                    continue
                l0 = w0 / area
                l1 = w1 / area
                l2 = w2 / area
                inv_z = l0 * iza + l1 * izb + l2 * izc
                d = np.float32(0.5 * (dz_a - dz_b * inv_z) + 0.5)
                if not d < depth[y, x]:
                    continue
                depth[y, x] = d
                if tid < 0:
                    color[y, x] = ignore
                    continue
                u = (l0 * iza * ua + l1 * izb * ub + l2 * izc * uc) / inv_z
                v = (l0 * iza * va + l1 * izb * vb + l2 * izc * vc) / inv_z
                fx = u * size
                fy = (1.0 - v) * size
                tx = min(max(int(math.floor(fx)), 0), size - 1)
                ty = min(max(int(math.floor(fy)), 0), size - 1)
                if use_owner and owner[ty, tx] != tid:
                    tx, ty = _snap(owner, size, tid, fx, fy, tx, ty)
                    if tx < 0:
                        color[y, x] = ignore
                        continue
                color[y, x] = texture[ty, tx]
