"""Z-buffered software rasterizer producing per-pixel instance-id and depth buffers.

Conventions (shared with the ray-casting reference so the two are
comparable):

  - Visibility is sampled at pixel centers (col + 0.5, row + 0.5); a
    top-left fill rule decides pixels whose center lies exactly on a
    projected edge, so shared edges are covered exactly once.
  - Depth is camera-space z, interpolated perspective-correctly (1/z is
    linear in screen space). Fragments are kept only for depth strictly
    inside (near, far); triangles are clipped geometrically against the
    near/far planes before projection.
  - No backface culling: scanned meshes are open surfaces.
  - Equal depths (within relative 1e-9) resolve to the smaller
    instance_id, so coplanar duplicate surfaces render deterministically.

The instance buffer is an H x W int32 array (0 = background); the depth
buffer is H x W float64 with +inf where nothing was rendered.
Everything is single-threaded and bit-deterministic.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .scene import BACKGROUND_ID, Camera, Scene, SceneObject, require_valid_camera, require_valid_scene

# fragments within this relative depth are considered tied between objects
DEPTH_TIE_REL = 1e-9


def rasterize_joint(scene: Scene, camera: Camera) -> tuple[np.ndarray, np.ndarray]:
    """Render all objects together; per pixel the nearest surface's instance id wins.

    Returns (instance_buffer, depth_buffer).
    """
    require_valid_scene(scene)
    require_valid_camera(camera)
    ids = np.full((camera.height, camera.width), BACKGROUND_ID, dtype=np.int32)
    depth = np.full((camera.height, camera.width), np.inf, dtype=np.float64)
    for obj in sorted(scene.objects, key=lambda o: o.instance_id):
        verts_cam = camera.world_to_camera(obj.mesh.vertices) if len(obj.mesh.vertices) else obj.mesh.vertices
        for rows, cols, frag_z in _mesh_fragments(verts_cam, obj.mesh.triangles, camera):
            cur_d = depth[rows, cols]
            cur_id = ids[rows, cols]
            same = cur_id == obj.instance_id
            take = np.where(same, frag_z < cur_d, frag_z < cur_d * (1.0 - DEPTH_TIE_REL))
            if not take.any():
                continue
            rows, cols, frag_z = rows[take], cols[take], frag_z[take]
            depth[rows, cols] = frag_z
            ids[rows, cols] = obj.instance_id
    return ids, depth


def rasterize_single(obj: SceneObject, camera: Camera) -> tuple[np.ndarray, np.ndarray]:
    """Render one object alone: (coverage mask, the object's own nearest depth)."""
    require_valid_camera(camera)
    _require_valid_mesh(obj)
    depth = np.full((camera.height, camera.width), np.inf, dtype=np.float64)
    verts_cam = camera.world_to_camera(obj.mesh.vertices) if len(obj.mesh.vertices) else obj.mesh.vertices
    for rows, cols, frag_z in _mesh_fragments(verts_cam, obj.mesh.triangles, camera):
        np.minimum.at(depth, (rows, cols), frag_z)
    return np.isfinite(depth), depth


def combine_object_depths(
    layers: list[tuple[int, np.ndarray]],
) -> tuple[np.ndarray, np.ndarray]:
    """Reduce per-object depth buffers to a joint (instance, depth) buffer pair.

    Applies the same cross-object rule as rasterize_joint: iterating in
    ascending instance id, an object takes a pixel only when strictly
    nearer by more than the tie tolerance, so ties resolve to the
    smaller id.
    """
    if not layers:
        raise ValueError("no layers to combine")
    layers = sorted(layers, key=lambda kv: kv[0])
    shape = layers[0][1].shape
    ids = np.full(shape, BACKGROUND_ID, dtype=np.int32)
    depth = np.full(shape, np.inf, dtype=np.float64)
    for instance_id, d in layers:
        if d.shape != shape:
            raise ValueError(f"layer {instance_id} has shape {d.shape}, expected {shape}")
        take = d < depth * (1.0 - DEPTH_TIE_REL)
        depth[take] = d[take]
        ids[take] = instance_id
    return ids, depth


def _require_valid_mesh(obj: SceneObject) -> None:
    from .scene import ValidationReport, mesh_violations

    report = ValidationReport()
    mesh_violations(obj.mesh, f"object {obj.instance_id}", report)
    if not report.ok:
        raise ValueError(str(report))


def _mesh_fragments(verts_cam: np.ndarray, triangles: np.ndarray, camera: Camera):
    """Yield (rows, cols, depth) fragment arrays for each clipped triangle."""
    if len(triangles) == 0:
        return
    near, far = camera.near, camera.far
    for tri in triangles:
        corners = verts_cam[tri]
        if corners[:, 2].max() <= near or corners[:, 2].min() >= far:
            continue
        poly = _clip_to_depth_range(corners, near, far)
        if len(poly) < 3:
            continue
        z = poly[:, 2]
        u = camera.fx * poly[:, 0] / z + camera.cx
        v = camera.fy * poly[:, 1] / z + camera.cy
        inv_z = 1.0 / z
        for k in range(1, len(poly) - 1):
            frag = _raster_projected_triangle(
                (u[0], v[0], inv_z[0]),
                (u[k], v[k], inv_z[k]),
                (u[k + 1], v[k + 1], inv_z[k + 1]),
                camera,
            )
            if frag is not None:
                yield frag


def _clip_to_depth_range(corners: np.ndarray, near: float, far: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a triangle against z >= near and z <= far."""
    poly = [corners[0], corners[1], corners[2]]
    for keep_if, boundary in ((lambda z: z >= near, near), (lambda z: z <= far, far)):
        clipped = []
        prev = poly[-1]
        prev_in = keep_if(prev[2])
        for cur in poly:
            cur_in = keep_if(cur[2])
            if cur_in != prev_in:
                t = (boundary - prev[2]) / (cur[2] - prev[2])
                clipped.append(prev + t * (cur - prev))
            if cur_in:
                clipped.append(cur)
            prev, prev_in = cur, cur_in
        poly = clipped
        if len(poly) < 3:
            return np.empty((0, 3))
    return np.asarray(poly)


def _raster_projected_triangle(p0, p1, p2, camera: Camera):
    """Rasterize one projected triangle; returns (rows, cols, depth) or None.

    Vertices are (u, v, 1/z) in screen space. The triangle is rewound to
    positive signed area so edge functions are non-negative inside.
    """
    u0, v0, w0 = p0
    u1, v1, w1 = p1
    u2, v2, w2 = p2
    area2 = (u1 - u0) * (v2 - v0) - (v1 - v0) * (u2 - u0)
    if area2 == 0.0:
        return None
    if area2 < 0.0:
        u1, v1, w1, u2, v2, w2 = u2, v2, w2, u1, v1, w1
        area2 = -area2

    c_lo = max(0, int(np.ceil(min(u0, u1, u2) - 0.5)))
    c_hi = min(camera.width - 1, int(np.floor(max(u0, u1, u2) - 0.5)))
    r_lo = max(0, int(np.ceil(min(v0, v1, v2) - 0.5)))
    r_hi = min(camera.height - 1, int(np.floor(max(v0, v1, v2) - 0.5)))
    if c_lo > c_hi or r_lo > r_hi:
        return None

    xs = np.arange(c_lo, c_hi + 1, dtype=np.float64) + 0.5
    ys = np.arange(r_lo, r_hi + 1, dtype=np.float64) + 0.5
    x, y = np.meshgrid(xs, ys)

    e0 = _edge_function(u1, v1, u2, v2, x, y)
    e1 = _edge_function(u2, v2, u0, v0, x, y)
    e2 = _edge_function(u0, v0, u1, v1, x, y)
    inside = (
        _covers(e0, u2 - u1, v2 - v1)
        & _covers(e1, u0 - u2, v0 - v2)
        & _covers(e2, u1 - u0, v1 - v0)
    )
    if not inside.any():
        return None

    lam0 = e0 / area2
    lam1 = e1 / area2
    lam2 = e2 / area2
    inv_z = lam0 * w0 + lam1 * w1 + lam2 * w2
    with np.errstate(divide="ignore"):
        frag_z = 1.0 / inv_z
    keep = inside & (frag_z > camera.near) & (frag_z < camera.far)
    if not keep.any():
        return None
    rr, cc = np.nonzero(keep)
    return rr + r_lo, cc + c_lo, frag_z[keep]


def _edge_function(ax, ay, bx, by, x, y):
    """Signed distance-like edge function; > 0 on the interior side for CCW-wound edges."""
    return (bx - ax) * (y - ay) - (by - ay) * (x - ax)


def _covers(e, dx, dy):
    # top-left rule in y-down screen coordinates: a horizontal edge pointing
    # +x is a top edge, an edge pointing -y is a left edge
    if dy < 0.0 or (dy == 0.0 and dx > 0.0):
        return e >= 0.0
    return e > 0.0


def dump_instance_png(ids: np.ndarray, path: str | Path) -> None:
    """Write the instance buffer as a 16-bit grayscale PNG (pixel value = id)."""
    from PIL import Image

    if ids.min() < 0 or ids.max() > np.iinfo(np.uint16).max:
        raise ValueError("instance ids out of uint16 range")
    Image.fromarray(ids.astype(np.uint16)).save(Path(path), format="PNG")


def dump_depth_grid(depth: np.ndarray, path: str | Path) -> None:
    """Write the depth buffer as float32 rows after an 8-byte (width, height) LE header."""
    h, w = depth.shape
    with open(path, "wb") as f:
        f.write(struct.pack("<II", w, h))
        f.write(depth.astype("<f4").tobytes())


def load_depth_grid(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise ValueError(f"{path}: truncated depth grid")
    w, h = struct.unpack_from("<II", data, 0)
    grid = np.frombuffer(data[8:], dtype="<f4")
    if grid.size != w * h:
        raise ValueError(f"{path}: expected {w * h} samples, found {grid.size}")
    return grid.reshape(h, w).astype(np.float64)
