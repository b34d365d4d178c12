"""Scene model: labeled per-object triangle meshes plus pinhole cameras.

All coordinates are meters in a right-handed world frame. Cameras use the
pinhole model with the camera frame oriented x-right, y-down, z-forward
(z is the viewing direction), so image row indices grow with camera-space
y and columns with x.

Instance id 0 is reserved for the background; real objects use ids >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BACKGROUND_ID = 0

ROTATION_TOL = 1e-6


class SceneLoadError(Exception):
    """Raised when a scene descriptor or one of its mesh files is unusable."""


@dataclass(frozen=True)
class Mesh:
    """Triangle mesh: vertices (N, 3) float64, triangles (M, 3) int vertex indices."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @property
    def is_empty(self) -> bool:
        return len(self.triangles) == 0


@dataclass(frozen=True)
class SceneObject:
    instance_id: int
    semantic_label: str
    category: str
    mesh: Mesh


@dataclass(frozen=True)
class Camera:
    """Pinhole camera. rotation/translation map world points into the camera frame."""

    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray
    translation: np.ndarray
    near: float
    far: float

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        """Transform (N, 3) world points into the camera frame."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        return pts @ self.rotation.T + self.translation


@dataclass(frozen=True)
class Scene:
    scene_id: str
    objects: tuple[SceneObject, ...] = ()
    cameras: tuple[tuple[str, Camera], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "cameras", tuple(self.cameras))

    def camera(self, camera_id: str) -> Camera:
        for cid, cam in self.cameras:
            if cid == camera_id:
                return cam
        raise KeyError(f"no camera {camera_id!r} in scene {self.scene_id!r}")

    def object_by_id(self, instance_id: int) -> SceneObject:
        for obj in self.objects:
            if obj.instance_id == instance_id:
                return obj
        raise KeyError(f"no object {instance_id} in scene {self.scene_id!r}")


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by validation."""

    kind: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.kind}] {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, subject: str, message: str) -> None:
        self.violations.append(Violation(kind, subject, message))

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)

    def __str__(self):
        return "\n".join(str(v) for v in self.violations) if self.violations else "ok"


def mesh_violations(mesh: Mesh, subject: str, report: ValidationReport) -> None:
    if not np.all(np.isfinite(mesh.vertices)):
        report.add("mesh-coordinates", subject, "vertices contain NaN or infinite coordinates")
    if mesh.is_empty:
        return
    if len(mesh.vertices) < 3:
        report.add("mesh-vertices", subject, f"mesh has triangles but only {len(mesh.vertices)} vertices")
    if len(mesh.triangles) and (mesh.triangles.min() < 0 or mesh.triangles.max() >= len(mesh.vertices)):
        report.add(
            "mesh-index",
            subject,
            f"triangle index out of range [0, {len(mesh.vertices)})",
        )


def camera_violations(camera: Camera, subject: str, report: ValidationReport) -> None:
    if camera.width <= 0 or camera.height <= 0:
        report.add("camera-size", subject, f"image size {camera.width}x{camera.height} must be positive")
    if camera.fx <= 0 or camera.fy <= 0:
        report.add("camera-focal", subject, f"focal lengths fx={camera.fx}, fy={camera.fy} must be positive")
    r = camera.rotation
    if not np.all(np.isfinite(r)) or not np.all(np.isfinite(camera.translation)):
        report.add("camera-pose", subject, "rotation/translation contain non-finite values")
        return
    if np.abs(r @ r.T - np.eye(3)).max() > ROTATION_TOL or abs(np.linalg.det(r) - 1.0) > ROTATION_TOL:
        report.add("camera-rotation", subject, "rotation is not orthonormal with determinant +1")
    if not (0 < camera.near < camera.far):
        report.add("camera-clip", subject, f"require 0 < near < far, got near={camera.near}, far={camera.far}")


def validate_scene(scene: Scene) -> ValidationReport:
    """Check every scene/object/camera invariant; returns all violations found.

    Pure function: violations are data, not exceptions.
    """
    report = ValidationReport()
    seen_ids: set[int] = set()
    for obj in scene.objects:
        subject = f"object {obj.instance_id}"
        if obj.instance_id <= BACKGROUND_ID:
            report.add("instance-id", subject, "instance_id must be a positive integer (0 is background)")
        if obj.instance_id in seen_ids:
            report.add("duplicate-id", subject, "instance_id used by more than one object")
        seen_ids.add(obj.instance_id)
        if not obj.semantic_label or not obj.category:
            report.add("labels", subject, "semantic_label and category must be non-empty")
        mesh_violations(obj.mesh, subject, report)
    seen_cams: set[str] = set()
    for cam_id, cam in scene.cameras:
        subject = f"camera {cam_id}"
        if cam_id in seen_cams:
            report.add("duplicate-camera", subject, "camera_id used more than once")
        seen_cams.add(cam_id)
        camera_violations(cam, subject, report)
    return report


def require_valid_camera(camera: Camera, subject: str = "camera") -> None:
    """Raise ValueError if the camera violates its invariants."""
    report = ValidationReport()
    camera_violations(camera, subject, report)
    if not report.ok:
        raise ValueError(str(report))


def require_valid_scene(scene: Scene) -> None:
    report = validate_scene(scene)
    if not report.ok:
        raise ValueError(str(report))
