"""Dataset manifest: persistent registry of images, records, and splits.

The manifest is a single JSON file with masks stored as column-major RLE,
so it stays diff-able and round-trips byte-identically (sorted keys,
repr float formatting). Writers replace the target atomically
(write-temp-then-rename). Splits partition scenes, never images or
records, so train/eval scene disjointness is structural and re-validated
on every import.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from .masks import RunLengthEncoding, rle_decode, rle_encode
from .pipeline import CURATION_STATUSES, AmodalRecord

FORMAT_VERSION = "1.0"

_MASK_FIELDS = ("modal", "amodal", "occluder", "boundary")


class ManifestError(Exception):
    """Raised for malformed or inconsistent manifests and prediction files."""


@dataclass(frozen=True)
class ImageInfo:
    image_id: str
    scene_id: str
    camera_id: str
    width: int
    height: int
    file_path: str | None = None


@dataclass
class DatasetManifest:
    version: str = FORMAT_VERSION
    images: list[ImageInfo] = field(default_factory=list)
    records: list[AmodalRecord] = field(default_factory=list)
    splits: dict[str, list[str]] = field(default_factory=dict)

    def image_by_id(self, image_id: str) -> ImageInfo:
        for img in self.images:
            if img.image_id == image_id:
                return img
        raise KeyError(f"unknown image_id {image_id!r}")

    def record_by_id(self, record_id: str) -> AmodalRecord:
        for rec in self.records:
            if rec.record_id == record_id:
                return rec
        raise KeyError(f"unknown record_id {record_id!r}")

    def records_for_image(self, image_id: str) -> list[AmodalRecord]:
        return [r for r in self.records if r.image_id == image_id]


def validate_manifest(manifest: DatasetManifest) -> None:
    """Raise ManifestError on any structural invariant violation."""
    image_dims: dict[str, tuple[int, int]] = {}
    for img in manifest.images:
        if img.image_id in image_dims:
            raise ManifestError(f"duplicate image_id {img.image_id!r}")
        if img.width <= 0 or img.height <= 0:
            raise ManifestError(f"image {img.image_id!r}: non-positive dimensions")
        image_dims[img.image_id] = (img.height, img.width)

    seen_records = set()
    for rec in manifest.records:
        if rec.record_id in seen_records:
            raise ManifestError(f"duplicate record_id {rec.record_id!r}")
        seen_records.add(rec.record_id)
        if rec.image_id not in image_dims:
            raise ManifestError(f"record {rec.record_id!r}: unknown image_id {rec.image_id!r}")
        dims = image_dims[rec.image_id]
        for name in _MASK_FIELDS:
            mask = getattr(rec, name)
            if mask.shape != dims:
                raise ManifestError(
                    f"record {rec.record_id!r}: {name} mask shape {mask.shape} does not match image {dims}"
                )
        if rec.curation_status not in CURATION_STATUSES:
            raise ManifestError(f"record {rec.record_id!r}: unknown curation status {rec.curation_status!r}")

    owner: dict[str, str] = {}
    for split_name, scene_ids in manifest.splits.items():
        for scene_id in scene_ids:
            if scene_id in owner:
                raise ManifestError(
                    f"scene {scene_id!r} assigned to both {owner[scene_id]!r} and {split_name!r}"
                )
            owner[scene_id] = split_name


def _record_to_json(rec: AmodalRecord) -> dict:
    doc = {
        "record_id": rec.record_id,
        "image_id": rec.image_id,
        "instance_id": rec.instance_id,
        "semantic_label": rec.semantic_label,
        "category": rec.category,
        "occlusion_ratio": rec.occlusion_ratio,
        "auto_selected": rec.auto_selected,
        "curation_status": rec.curation_status,
        "tags": list(rec.tags),
    }
    for name in _MASK_FIELDS:
        doc[name] = rle_encode(getattr(rec, name)).to_json()
    return doc


def _record_from_json(doc: dict) -> AmodalRecord:
    record_id = doc.get("record_id", "<missing id>")
    masks = {}
    for name in _MASK_FIELDS:
        try:
            rle = RunLengthEncoding.from_json(doc[name])
            masks[name] = rle_decode(rle)
        except (KeyError, ValueError) as exc:
            raise ManifestError(f"record {record_id!r}: bad {name} mask: {exc}") from exc
    try:
        return AmodalRecord(
            record_id=str(doc["record_id"]),
            image_id=str(doc["image_id"]),
            instance_id=int(doc["instance_id"]),
            semantic_label=str(doc["semantic_label"]),
            category=str(doc["category"]),
            occlusion_ratio=float(doc["occlusion_ratio"]),
            auto_selected=bool(doc["auto_selected"]),
            curation_status=str(doc["curation_status"]),
            tags=[str(t) for t in doc.get("tags", [])],
            **masks,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"record {record_id!r}: malformed entry: {exc}") from exc


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    validate_manifest(manifest)
    doc = {
        "version": manifest.version,
        "images": [
            {
                "image_id": img.image_id,
                "scene_id": img.scene_id,
                "camera_id": img.camera_id,
                "width": img.width,
                "height": img.height,
                "file_path": img.file_path,
            }
            for img in sorted(manifest.images, key=lambda i: i.image_id)
        ],
        "records": [_record_to_json(r) for r in sorted(manifest.records, key=lambda r: r.record_id)],
        "splits": {name: sorted(ids) for name, ids in manifest.splits.items()},
    }
    _atomic_write_text(Path(path), json.dumps(doc, indent=2, sort_keys=True) + "\n")


def export_manifest(
    records: Iterable[AmodalRecord],
    images: Iterable[ImageInfo],
    splits: Mapping[str, Iterable[str]],
    path: str | Path,
) -> DatasetManifest:
    """Assemble, validate, and write a manifest; byte-stable for identical inputs."""
    manifest = DatasetManifest(
        version=FORMAT_VERSION,
        images=list(images),
        records=list(records),
        splits={name: list(ids) for name, ids in splits.items()},
    )
    save_manifest(manifest, path)
    return manifest


def import_manifest(path: str | Path) -> DatasetManifest:
    """Read and validate a manifest; every RLE is decoded eagerly."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    try:
        images = [
            ImageInfo(
                image_id=str(e["image_id"]),
                scene_id=str(e["scene_id"]),
                camera_id=str(e["camera_id"]),
                width=int(e["width"]),
                height=int(e["height"]),
                file_path=e.get("file_path"),
            )
            for e in doc.get("images", [])
        ]
        splits = {str(k): [str(s) for s in v] for k, v in doc.get("splits", {}).items()}
        version = str(doc.get("version", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"{path}: malformed manifest: {exc}") from exc
    records = [_record_from_json(e) for e in doc.get("records", [])]
    manifest = DatasetManifest(version=version, images=images, records=records, splits=splits)
    try:
        validate_manifest(manifest)
    except ManifestError as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    return manifest


def split_by_scene(manifest: DatasetManifest, assignment: Mapping[str, str]) -> DatasetManifest:
    """Assign scenes to named splits; records inherit their scene's split.

    The mapping is scene_id -> split_name, so a scene cannot land in two
    splits; the result is re-validated anyway.
    """
    splits: dict[str, list[str]] = {}
    for scene_id, split_name in assignment.items():
        splits.setdefault(split_name, []).append(scene_id)
    out = replace(manifest, splits={k: sorted(v) for k, v in splits.items()})
    validate_manifest(out)
    return out


def records_in_split(manifest: DatasetManifest, split_name: str) -> list[AmodalRecord]:
    scene_ids = set(manifest.splits.get(split_name, []))
    image_ids = {img.image_id for img in manifest.images if img.scene_id in scene_ids}
    return [r for r in manifest.records if r.image_id in image_ids]


def write_predictions(predictions: Iterable[tuple[str, RunLengthEncoding]], path: str | Path) -> None:
    """Prediction file: JSON list of {record_id, amodal: {size, counts}}."""
    doc = [{"record_id": rid, "amodal": rle.to_json()} for rid, rle in predictions]
    _atomic_write_text(Path(path), json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_predictions(path: str | Path) -> list[tuple[str, RunLengthEncoding]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"prediction file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ManifestError(f"{path}: expected a JSON list of predictions")
    out = []
    for entry in doc:
        try:
            out.append((str(entry["record_id"]), RunLengthEncoding.from_json(entry["amodal"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"{path}: malformed prediction entry {entry!r}: {exc}") from exc
    return out
