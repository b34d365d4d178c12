"""Toolkit for generating, curating, and evaluating amodal segmentation ground truth.

Labeled 3D scene meshes are projected through pinhole cameras to obtain
per-object modal (visible) and amodal (full-extent) masks; occluded
objects are selected automatically, reviewed by annotators over a
two-round HTTP workflow, and exported as a versioned dataset manifest
ready for evaluation with the mIoU / inverse-mIoU metrics.
"""

from .curation import CurationDecision, CurationState, DecisionLog, apply_decisions
from .manifest import (
    DatasetManifest,
    ImageInfo,
    ManifestError,
    export_manifest,
    import_manifest,
    read_predictions,
    split_by_scene,
    write_predictions,
)
from .masks import (
    RunLengthEncoding,
    boundary_band,
    mask_area,
    mask_difference,
    mask_intersection,
    mask_iou,
    mask_union,
    rle_decode,
    rle_encode,
)
from .metrics import EvalPair, MetricsReport, StatsReport, dataset_stats, evaluate, identity_baseline, miou, miou_inv
from .pipeline import (
    AmodalRecord,
    GenerationConfig,
    build_records,
    derive_occluder,
    generate_amodal_masks,
    generate_modal_masks,
    is_occluded_selected,
    occlusion_boundary,
    occlusion_ratio,
)
from .rasterize import combine_object_depths, rasterize_joint, rasterize_single
from .raycast import raycast_reference
from .scene import Camera, Mesh, Scene, SceneLoadError, SceneObject, validate_scene
from .sceneio import load_scene, save_scene
from .synth import make_random_scene, make_two_box_scene

__version__ = "0.1.0"

__all__ = [
    "AmodalRecord",
    "Camera",
    "CurationDecision",
    "CurationState",
    "DatasetManifest",
    "DecisionLog",
    "EvalPair",
    "GenerationConfig",
    "ImageInfo",
    "ManifestError",
    "Mesh",
    "MetricsReport",
    "RunLengthEncoding",
    "Scene",
    "SceneLoadError",
    "SceneObject",
    "StatsReport",
    "apply_decisions",
    "boundary_band",
    "build_records",
    "combine_object_depths",
    "dataset_stats",
    "derive_occluder",
    "evaluate",
    "export_manifest",
    "generate_amodal_masks",
    "generate_modal_masks",
    "identity_baseline",
    "import_manifest",
    "is_occluded_selected",
    "load_scene",
    "make_random_scene",
    "make_two_box_scene",
    "mask_area",
    "mask_difference",
    "mask_intersection",
    "mask_iou",
    "mask_union",
    "miou",
    "miou_inv",
    "occlusion_boundary",
    "occlusion_ratio",
    "rasterize_joint",
    "rasterize_single",
    "raycast_reference",
    "read_predictions",
    "rle_decode",
    "rle_encode",
    "save_scene",
    "split_by_scene",
    "validate_scene",
    "write_predictions",
]
