"""Brute-force ray-casting renderer, the independent reference for the rasterizer.

One ray is cast through each pixel center and intersected with every
triangle of the scene using a watertight signed-area test: triangle
vertices are sheared into the ray's frame (the ray becomes the z-axis)
and the three 2D edge functions U, V, W decide coverage. Because the
sheared vertex coordinates depend only on (ray, vertex), adjacent
triangles sharing an edge see exactly opposite edge values, so shared
edges cannot leak rays between triangles. Boundary hits are inclusive.

Depth is the camera-space z of the hit (rays are parameterized with
direction z-component 1). Hits are kept for depth strictly inside
(near, far); the nearest wins, with ties within relative 1e-9 resolved
to the smaller instance id. Semantics match rasterize_joint by
construction, not by shared code.
"""

from __future__ import annotations

import numpy as np

from .scene import BACKGROUND_ID, Camera, Scene, require_valid_camera, require_valid_scene

_TIE_REL = 1e-9
_NO_ID = np.iinfo(np.int32).max


def raycast_reference(scene: Scene, camera: Camera) -> tuple[np.ndarray, np.ndarray]:
    """Render the scene by per-pixel ray casting; returns (instance_buffer, depth_buffer)."""
    require_valid_scene(scene)
    require_valid_camera(camera)
    height, width = camera.height, camera.width
    ids_out = np.full((height, width), BACKGROUND_ID, dtype=np.int32)
    depth_out = np.full((height, width), np.inf, dtype=np.float64)

    tri_verts, tri_ids = _gather_triangles(scene, camera)
    if len(tri_ids) == 0:
        return ids_out, depth_out

    ax, ay, az = tri_verts[:, 0, 0], tri_verts[:, 0, 1], tri_verts[:, 0, 2]
    bx, by, bz = tri_verts[:, 1, 0], tri_verts[:, 1, 1], tri_verts[:, 1, 2]
    cx, cy, cz = tri_verts[:, 2, 0], tri_verts[:, 2, 1], tri_verts[:, 2, 2]

    dx_cols = (np.arange(width, dtype=np.float64) + 0.5 - camera.cx) / camera.fx
    dy_rows = (np.arange(height, dtype=np.float64) + 0.5 - camera.cy) / camera.fy

    # chunk scanlines so the (pixels x triangles) workspace stays small
    rows_per_chunk = max(1, int(2_000_000 // (width * max(1, len(tri_ids)))))
    for r0 in range(0, height, rows_per_chunk):
        r1 = min(height, r0 + rows_per_chunk)
        dy, dx = np.meshgrid(dy_rows[r0:r1], dx_cols, indexing="ij")
        dx = dx.reshape(-1, 1)
        dy = dy.reshape(-1, 1)

        # shear each vertex into the ray frame (ray direction becomes +z)
        sax, say = ax - dx * az, ay - dy * az
        sbx, sby = bx - dx * bz, by - dy * bz
        scx, scy = cx - dx * cz, cy - dy * cz

        edge_u = scx * sby - scy * sbx
        edge_v = sax * scy - say * scx
        edge_w = sbx * say - sby * sax
        det = edge_u + edge_v + edge_w
        hit = ((edge_u >= 0) & (edge_v >= 0) & (edge_w >= 0)) | (
            (edge_u <= 0) & (edge_v <= 0) & (edge_w <= 0)
        )
        hit &= det != 0

        with np.errstate(divide="ignore", invalid="ignore"):
            t = (edge_u * az + edge_v * bz + edge_w * cz) / det
        hit &= (t > camera.near) & (t < camera.far)

        depths = np.where(hit, t, np.inf)
        nearest = depths.min(axis=1)
        covered = np.isfinite(nearest)
        tied = depths <= nearest[:, None] * (1.0 + _TIE_REL)
        winner = np.where(tied, tri_ids[None, :], _NO_ID).min(axis=1)
        winner_depth = np.where(
            tied & (tri_ids[None, :] == winner[:, None]), depths, np.inf
        ).min(axis=1)

        ids_block = np.where(covered, winner, BACKGROUND_ID).astype(np.int32)
        ids_out[r0:r1] = ids_block.reshape(r1 - r0, width)
        depth_out[r0:r1] = np.where(covered, winner_depth, np.inf).reshape(r1 - r0, width)
    return ids_out, depth_out


def _gather_triangles(scene: Scene, camera: Camera) -> tuple[np.ndarray, np.ndarray]:
    """All scene triangles in camera space as (T, 3 corners, xyz) plus per-triangle ids."""
    verts_list = []
    ids_list = []
    for obj in sorted(scene.objects, key=lambda o: o.instance_id):
        mesh = obj.mesh
        if mesh.is_empty:
            continue
        cam_verts = camera.world_to_camera(mesh.vertices)
        verts_list.append(cam_verts[mesh.triangles])
        ids_list.append(np.full(len(mesh.triangles), obj.instance_id, dtype=np.int32))
    if not verts_list:
        return np.empty((0, 3, 3)), np.empty(0, dtype=np.int32)
    return np.concatenate(verts_list, axis=0), np.concatenate(ids_list)
