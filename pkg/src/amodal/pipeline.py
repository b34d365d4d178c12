"""Automatic ground-truth generation for occluded objects.

For every object in a scene the joint render gives its modal (visible)
mask and a solo render gives its amodal (full-extent) mask. Objects whose
amodal area exceeds the modal area by the selection threshold are emitted
as candidate records, together with the occluder mask (union of the
modal masks of the objects hiding them) and the occlusion boundary (the
band of modal pixels adjacent to the occluder), ready for manual review.

Both masks come from the same camera, so out-of-frame truncation affects
modal and amodal alike and never counts as occlusion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .masks import boundary_band, mask_area
from .rasterize import rasterize_joint, rasterize_single
from .scene import Camera, Scene

CURATION_STATUSES = ("pending", "round1_yes", "round1_no", "accepted", "rejected")


@dataclass
class GenerationConfig:
    """Knobs for candidate selection.

    selection_threshold: amodal area must exceed threshold x modal area (strictly).
    boundary_radius: width in pixels of the occlusion boundary band.
    min_amodal_area: discard speck projections below this area before selection.
    """

    selection_threshold: float = 1.2
    boundary_radius: int = 1
    min_amodal_area: int = 16

    def __post_init__(self):
        if not self.selection_threshold > 1.0:
            raise ValueError(f"selection_threshold must be > 1, got {self.selection_threshold}")
        if self.boundary_radius < 1:
            raise ValueError(f"boundary_radius must be positive, got {self.boundary_radius}")
        if self.min_amodal_area < 0:
            raise ValueError(f"min_amodal_area must be >= 0, got {self.min_amodal_area}")


@dataclass
class AmodalRecord:
    """One occluded-object annotation candidate."""

    record_id: str
    image_id: str
    instance_id: int
    semantic_label: str
    category: str
    modal: np.ndarray
    amodal: np.ndarray
    occluder: np.ndarray
    boundary: np.ndarray
    occlusion_ratio: float
    auto_selected: bool = True
    curation_status: str = "pending"
    tags: list[str] = field(default_factory=list)


def generate_modal_masks(scene: Scene, camera: Camera) -> dict[int, np.ndarray]:
    """Visible-pixel mask per object from the joint render (empty masks included)."""
    ids, _ = rasterize_joint(scene, camera)
    return {obj.instance_id: ids == obj.instance_id for obj in sorted(scene.objects, key=lambda o: o.instance_id)}


def generate_amodal_masks(scene: Scene, camera: Camera) -> dict[int, np.ndarray]:
    """Full-extent mask per object, each rendered alone."""
    out = {}
    for obj in sorted(scene.objects, key=lambda o: o.instance_id):
        mask, _ = rasterize_single(obj, camera)
        out[obj.instance_id] = mask
    return out


def _require_subset(modal: np.ndarray, amodal: np.ndarray) -> None:
    if modal.shape != amodal.shape:
        raise ValueError(f"mask dimensions differ: {modal.shape} vs {amodal.shape}")
    if np.any(modal & ~amodal):
        raise ValueError("modal mask is not contained in the amodal mask")


def is_occluded_selected(modal: np.ndarray, amodal: np.ndarray, threshold: float) -> bool:
    """True iff the amodal area strictly exceeds threshold times the modal area."""
    _require_subset(modal, amodal)
    return mask_area(amodal) > threshold * mask_area(modal)


def occlusion_ratio(modal: np.ndarray, amodal: np.ndarray) -> float:
    """Occluded fraction: (amodal area - modal area) / amodal area."""
    _require_subset(modal, amodal)
    amodal_area = mask_area(amodal)
    if amodal_area == 0:
        raise ValueError("occlusion ratio undefined for an empty amodal mask")
    return (amodal_area - mask_area(modal)) / amodal_area


def derive_occluder(target_id: int, modal_masks: dict[int, np.ndarray], amodal: np.ndarray) -> np.ndarray:
    """Union of the full modal masks of every object covering part of the target's hidden region."""
    if target_id not in modal_masks:
        raise ValueError(f"target instance {target_id} not present in modal masks")
    modal = modal_masks[target_id]
    _require_subset(modal, amodal)
    hidden = amodal & ~modal
    occluder = np.zeros_like(modal)
    for other_id in sorted(modal_masks):
        if other_id == target_id:
            continue
        other = modal_masks[other_id]
        if np.any(other & hidden):
            occluder |= other
    return occluder


def occlusion_boundary(modal: np.ndarray, occluder: np.ndarray, radius: int) -> np.ndarray:
    """Band of modal pixels within `radius` (4-connected) of the occluder."""
    return boundary_band(modal, occluder, radius)


def build_records(
    scene: Scene,
    camera: Camera,
    image_id: str,
    config: GenerationConfig | None = None,
) -> list[AmodalRecord]:
    """Run the full generation pass for one (scene, camera) pair.

    Emits one record per object that passes the min-area filter and the
    selection rule, ordered by instance id. Objects occluded everywhere
    (empty modal mask) are skipped: with no visible pixels there is
    nothing for a completion model to start from, and the occlusion
    ratio would degenerate to 1.
    """
    config = config or GenerationConfig()
    modal_masks = generate_modal_masks(scene, camera)
    amodal_masks = generate_amodal_masks(scene, camera)

    records = []
    for obj in sorted(scene.objects, key=lambda o: o.instance_id):
        amodal = amodal_masks[obj.instance_id]
        modal = modal_masks[obj.instance_id]
        if mask_area(amodal) < max(config.min_amodal_area, 1):
            continue
        if mask_area(modal) == 0:
            continue
        if not is_occluded_selected(modal, amodal, config.selection_threshold):
            continue
        occluder = derive_occluder(obj.instance_id, modal_masks, amodal)
        records.append(
            AmodalRecord(
                record_id=f"{image_id}:{obj.instance_id:06d}",
                image_id=image_id,
                instance_id=obj.instance_id,
                semantic_label=obj.semantic_label,
                category=obj.category,
                modal=modal,
                amodal=amodal,
                occluder=occluder,
                boundary=occlusion_boundary(modal, occluder, config.boundary_radius),
                occlusion_ratio=occlusion_ratio(modal, amodal),
            )
        )
    return records
