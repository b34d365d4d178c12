"""Scene descriptor I/O.

A scene is stored as one JSON descriptor referencing external mesh files,
one per object (large scans stay out of the descriptor). Descriptor
fields:

    scene_id: string
    objects:  [{instance_id, semantic_label, category, mesh_path}]
    cameras:  [{camera_id, width, height, fx, fy, cx, cy,
                rotation (9 row-major numbers), translation (3 numbers),
                near, far}]

mesh_path is resolved relative to the descriptor's directory.
"""

from __future__ import annotations

import json
from pathlib import Path

from .meshio import load_mesh, save_mesh
from .scene import Camera, Scene, SceneLoadError, SceneObject, validate_scene


def load_scene(path: str | Path) -> Scene:
    """Load and validate a scene descriptor plus all referenced meshes.

    Raises FileNotFoundError for missing files and SceneLoadError (with
    file and object context) for malformed content or invariant
    violations.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"scene descriptor not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SceneLoadError(f"{path}: malformed descriptor: {exc}") from exc

    try:
        scene_id = doc["scene_id"]
        object_entries = doc.get("objects", [])
        camera_entries = doc.get("cameras", [])
    except (KeyError, TypeError) as exc:
        raise SceneLoadError(f"{path}: malformed descriptor: {exc}") from exc

    objects = []
    for entry in object_entries:
        try:
            instance_id = int(entry["instance_id"])
            mesh_path = path.parent / entry["mesh_path"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneLoadError(f"{path}: malformed object entry {entry!r}") from exc
        try:
            mesh = load_mesh(mesh_path)
        except SceneLoadError as exc:
            raise SceneLoadError(f"object {instance_id}: {exc}") from exc
        objects.append(
            SceneObject(
                instance_id=instance_id,
                semantic_label=str(entry.get("semantic_label", "")),
                category=str(entry.get("category", "")),
                mesh=mesh,
            )
        )

    cameras = []
    for entry in camera_entries:
        try:
            cameras.append(
                (
                    str(entry["camera_id"]),
                    Camera(
                        width=int(entry["width"]),
                        height=int(entry["height"]),
                        fx=float(entry["fx"]),
                        fy=float(entry["fy"]),
                        cx=float(entry["cx"]),
                        cy=float(entry["cy"]),
                        rotation=entry["rotation"],
                        translation=entry["translation"],
                        near=float(entry["near"]),
                        far=float(entry["far"]),
                    ),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneLoadError(f"{path}: malformed camera entry {entry!r}: {exc}") from exc

    scene = Scene(scene_id=str(scene_id), objects=tuple(objects), cameras=tuple(cameras))
    report = validate_scene(scene)
    if not report.ok:
        raise SceneLoadError(f"{path}: invalid scene:\n{report}")
    return scene


def save_scene(scene: Scene, path: str | Path, mesh_format: str = "obj") -> Path:
    """Write a scene descriptor and one mesh file per object next to it.

    OBJ (the default) preserves full float precision so load(save(x))
    reproduces coordinates exactly; PLY stores float32.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if mesh_format not in ("obj", "ply"):
        raise ValueError(f"unsupported mesh format {mesh_format!r}")

    object_entries = []
    for obj in scene.objects:
        mesh_name = f"object_{obj.instance_id:06d}.{mesh_format}"
        save_mesh(obj.mesh, path.parent / mesh_name)
        object_entries.append(
            {
                "instance_id": obj.instance_id,
                "semantic_label": obj.semantic_label,
                "category": obj.category,
                "mesh_path": mesh_name,
            }
        )

    camera_entries = []
    for cam_id, cam in scene.cameras:
        camera_entries.append(
            {
                "camera_id": cam_id,
                "width": cam.width,
                "height": cam.height,
                "fx": cam.fx,
                "fy": cam.fy,
                "cx": cam.cx,
                "cy": cam.cy,
                "rotation": [float(v) for v in cam.rotation.reshape(-1)],
                "translation": [float(v) for v in cam.translation],
                "near": cam.near,
                "far": cam.far,
            }
        )

    doc = {"scene_id": scene.scene_id, "objects": object_entries, "cameras": camera_entries}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
