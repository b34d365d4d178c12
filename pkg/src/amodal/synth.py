"""Parametric test scenes with analytically known modal/amodal masks.

The fixed two-rectangle scene is built so that every projected edge lands
exactly on an integer pixel boundary while sampling happens at pixel
centers, making the expected pixel counts exact integers with no edge
ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import Camera, Mesh, Scene, SceneObject


@dataclass(frozen=True)
class BoxSpec:
    center: tuple[float, float, float]
    half_extents: tuple[float, float, float]
    instance_id: int
    semantic_label: str
    category: str


@dataclass(frozen=True)
class ExpectedInstance:
    modal_area: int
    amodal_area: int
    occlusion_ratio: float
    selected: bool


@dataclass(frozen=True)
class AnalyticGroundTruth:
    """Expected per-instance pipeline outputs under the default 1.2 threshold."""

    instances: dict[int, ExpectedInstance]


def identity_camera(width: int, height: int, focal: float, near: float = 0.1, far: float = 100.0) -> Camera:
    return Camera(
        width=width,
        height=height,
        fx=focal,
        fy=focal,
        cx=width / 2.0,
        cy=height / 2.0,
        rotation=np.eye(3),
        translation=np.zeros(3),
        near=near,
        far=far,
    )


def quad_mesh(center: tuple[float, float, float], half_w: float, half_h: float) -> Mesh:
    """Camera-facing rectangle at constant z, split into two triangles."""
    cx, cy, cz = center
    vertices = np.array(
        [
            [cx - half_w, cy - half_h, cz],
            [cx + half_w, cy - half_h, cz],
            [cx + half_w, cy + half_h, cz],
            [cx - half_w, cy + half_h, cz],
        ]
    )
    triangles = np.array([[0, 1, 2], [0, 2, 3]])
    return Mesh(vertices=vertices, triangles=triangles)


def box_mesh(center: tuple[float, float, float], half_extents: tuple[float, float, float]) -> Mesh:
    cx, cy, cz = center
    hx, hy, hz = half_extents
    vertices = np.array(
        [
            [cx - hx, cy - hy, cz - hz],
            [cx + hx, cy - hy, cz - hz],
            [cx + hx, cy + hy, cz - hz],
            [cx - hx, cy + hy, cz - hz],
            [cx - hx, cy - hy, cz + hz],
            [cx + hx, cy - hy, cz + hz],
            [cx + hx, cy + hy, cz + hz],
            [cx - hx, cy + hy, cz + hz],
        ]
    )
    triangles = np.array(
        [
            [0, 1, 2], [0, 2, 3],  # z- face
            [4, 6, 5], [4, 7, 6],  # z+ face
            [0, 4, 5], [0, 5, 1],  # y- face
            [3, 2, 6], [3, 6, 7],  # y+ face
            [0, 3, 7], [0, 7, 4],  # x- face
            [1, 5, 6], [1, 6, 2],  # x+ face
        ]
    )
    return Mesh(vertices=vertices, triangles=triangles)


def make_two_box_scene() -> tuple[Scene, Camera, AnalyticGroundTruth]:
    """Front rectangle at z=1 exactly covering the left half of a back rectangle at z=2.

    Under the 100x100 camera with focal 100: the back rectangle projects
    to the 50x50 pixel block (rows and columns 25..74, amodal area 2500),
    the front one to its left half (columns 25..49). The back object is
    therefore half occluded (modal 1250, ratio 0.5) and selected at the
    default threshold; the front object is unoccluded.
    """
    camera = identity_camera(width=100, height=100, focal=100.0, near=0.1, far=10.0)
    front = SceneObject(
        instance_id=1,
        semantic_label="bed",
        category="bed",
        mesh=quad_mesh((-0.125, 0.0, 1.0), half_w=0.125, half_h=0.25),
    )
    back = SceneObject(
        instance_id=2,
        semantic_label="dining chair",
        category="chair",
        mesh=quad_mesh((0.0, 0.0, 2.0), half_w=0.5, half_h=0.5),
    )
    scene = Scene(scene_id="two_box", objects=(front, back), cameras=(("cam0", camera),))
    truth = AnalyticGroundTruth(
        instances={
            1: ExpectedInstance(modal_area=1250, amodal_area=1250, occlusion_ratio=0.0, selected=False),
            2: ExpectedInstance(modal_area=1250, amodal_area=2500, occlusion_ratio=0.5, selected=True),
        }
    )
    return scene, camera, truth


_CATEGORIES = ("chair", "table", "sofa", "bed", "cabinet")


def make_random_scene(seed: int, n_objects: int, width: int = 128, height: int = 128) -> Scene:
    """Axis-aligned boxes at random positions and depths inside the camera frustum.

    Deterministic for a given seed; the result always passes validate_scene.
    """
    if n_objects < 0:
        raise ValueError("n_objects must be >= 0")
    camera = identity_camera(width=width, height=height, focal=float(width), near=0.1, far=100.0)
    rng = np.random.default_rng(seed)
    objects = []
    for i in range(1, n_objects + 1):
        z = rng.uniform(2.5, 8.0)
        half = (rng.uniform(0.15, 0.7), rng.uniform(0.15, 0.7), rng.uniform(0.05, 0.4))
        # keep centers inside roughly 70% of the frustum cross-section at depth z
        lateral = 0.35 * z
        center = (rng.uniform(-lateral, lateral), rng.uniform(-lateral, lateral), z)
        category = _CATEGORIES[int(rng.integers(len(_CATEGORIES)))]
        objects.append(
            SceneObject(
                instance_id=i,
                semantic_label=f"{category} {i}",
                category=category,
                mesh=box_mesh(center, half),
            )
        )
    return Scene(
        scene_id=f"random_{seed:04d}",
        objects=tuple(objects),
        cameras=(("cam0", camera),),
    )
