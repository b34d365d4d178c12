"""Mesh file loading and saving.

Two formats are supported:
  - ASCII OBJ subset: `v x y z` vertices and `f` faces with exactly three
    1-based indices (slash-separated attribute references are accepted and
    the vertex index taken). OBJ is written with full float precision, so
    save/load round-trips are exact.
  - binary little-endian PLY subset: vertex x/y/z float32, faces as
    (uint8 count = 3, 3x int32 indices).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .scene import Mesh, SceneLoadError


def load_mesh(path: str | Path) -> Mesh:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"mesh file not found: {path}")
    suffix = path.suffix.lower()
    if suffix == ".obj":
        return load_obj(path)
    if suffix == ".ply":
        return load_ply(path)
    raise SceneLoadError(f"{path}: unsupported mesh format {suffix!r} (expected .obj or .ply)")


def save_mesh(mesh: Mesh, path: str | Path) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".obj":
        save_obj(mesh, path)
    elif suffix == ".ply":
        save_ply(mesh, path)
    else:
        raise ValueError(f"unsupported mesh format {suffix!r}")


def load_obj(path: str | Path) -> Mesh:
    path = Path(path)
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise SceneLoadError(f"{path}:{lineno}: vertex line needs 3 coordinates")
            try:
                vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError as exc:
                raise SceneLoadError(f"{path}:{lineno}: bad vertex coordinate") from exc
        elif tag == "f":
            refs = parts[1:]
            if len(refs) != 3:
                raise SceneLoadError(
                    f"{path}:{lineno}: only triangular faces are supported, got {len(refs)} vertices"
                )
            idx = []
            for ref in refs:
                token = ref.split("/")[0]
                try:
                    i = int(token)
                except ValueError as exc:
                    raise SceneLoadError(f"{path}:{lineno}: bad face index {ref!r}") from exc
                if i < 1:
                    raise SceneLoadError(f"{path}:{lineno}: face indices are 1-based, got {i}")
                idx.append(i - 1)
            faces.append(tuple(idx))
        # other directives (vn, vt, o, g, s, usemtl, ...) are ignored
    return Mesh(
        vertices=np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
        triangles=np.asarray(faces, dtype=np.int64).reshape(-1, 3),
    )


def save_obj(mesh: Mesh, path: str | Path) -> None:
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {float(x)!r} {float(y)!r} {float(z)!r}")
    for a, b, c in mesh.triangles:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


_PLY_FLOAT_NAMES = {"float", "float32"}
_PLY_INT_NAMES = {"int", "int32", "uint", "uint32"}
_PLY_COUNT_NAMES = {"uchar", "uint8", "char", "int8"}


def load_ply(path: str | Path) -> Mesh:
    path = Path(path)
    data = path.read_bytes()
    end = data.find(b"end_header\n")
    if not data.startswith(b"ply") or end < 0:
        raise SceneLoadError(f"{path}: not a PLY file")
    header_lines = data[:end].decode("ascii", errors="replace").splitlines()
    body = data[end + len(b"end_header\n"):]

    n_vertex = n_face = None
    current = None
    vertex_props: list[str] = []
    fmt_ok = False
    for line in header_lines[1:]:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "format":
            fmt_ok = parts[1] == "binary_little_endian"
        elif parts[0] == "element":
            current = parts[1]
            if current == "vertex":
                n_vertex = int(parts[2])
            elif current == "face":
                n_face = int(parts[2])
        elif parts[0] == "property" and current == "vertex":
            if parts[1] == "list":
                raise SceneLoadError(f"{path}: list properties on vertices are not supported")
            if parts[1] not in _PLY_FLOAT_NAMES:
                raise SceneLoadError(f"{path}: vertex property type {parts[1]!r} not in supported subset")
            vertex_props.append(parts[2])
        elif parts[0] == "property" and current == "face":
            if parts[1] != "list" or parts[2] not in _PLY_COUNT_NAMES or parts[3] not in _PLY_INT_NAMES:
                raise SceneLoadError(f"{path}: face property {line!r} not in supported subset")
    if not fmt_ok:
        raise SceneLoadError(f"{path}: only binary_little_endian PLY is supported")
    if n_vertex is None or n_face is None:
        raise SceneLoadError(f"{path}: missing vertex or face element")
    if vertex_props[:3] != ["x", "y", "z"]:
        raise SceneLoadError(f"{path}: vertex properties must start with x, y, z (got {vertex_props})")

    stride = 4 * len(vertex_props)
    need = n_vertex * stride
    if len(body) < need:
        raise SceneLoadError(f"{path}: truncated vertex data")
    verts = np.frombuffer(body[:need], dtype="<f4").reshape(n_vertex, len(vertex_props))[:, :3]
    offset = need

    faces = np.empty((n_face, 3), dtype=np.int64)
    for i in range(n_face):
        if offset + 1 > len(body):
            raise SceneLoadError(f"{path}: truncated face data")
        count = body[offset]
        offset += 1
        if count != 3:
            raise SceneLoadError(f"{path}: face {i} has {count} vertices, only triangles are supported")
        if offset + 12 > len(body):
            raise SceneLoadError(f"{path}: truncated face data")
        faces[i] = struct.unpack_from("<3i", body, offset)
        offset += 12
    return Mesh(vertices=verts.astype(np.float64), triangles=faces)


def save_ply(mesh: Mesh, path: str | Path) -> None:
    n_vertex = len(mesh.vertices)
    n_face = len(mesh.triangles)
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"element vertex {n_vertex}\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        f"element face {n_face}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    )
    out = bytearray(header.encode("ascii"))
    out += mesh.vertices.astype("<f4").tobytes()
    for a, b, c in mesh.triangles:
        out += struct.pack("<B3i", 3, int(a), int(b), int(c))
    Path(path).write_bytes(bytes(out))
