"""Command-line entry point.

Subcommands:
  synth     write a synthetic scene (descriptor + meshes) to a directory
  generate  run ground-truth generation over a scene, writing a manifest
  eval      score a prediction file against a manifest
  stats     dataset statistics over the accepted records of a manifest
  serve     start the curation HTTP service

Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.
Identical inputs and flags produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from .curation import CurationError
from .manifest import (
    DatasetManifest,
    ImageInfo,
    ManifestError,
    import_manifest,
    read_predictions,
    save_manifest,
)
from .masks import rle_decode
from .metrics import EvalPair, dataset_stats, evaluate
from .pipeline import GenerationConfig, build_records
from .rasterize import rasterize_joint
from .scene import SceneLoadError
from .sceneio import load_scene, save_scene
from .synth import make_random_scene, make_two_box_scene

USAGE_ERROR = 64

_VIS_PALETTE = (
    (230, 80, 60),
    (70, 160, 230),
    (90, 200, 110),
    (240, 190, 60),
    (170, 110, 220),
    (240, 130, 190),
    (110, 220, 210),
    (230, 150, 90),
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="amodal", description="Amodal ground-truth generation and evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="write a synthetic test scene")
    p.add_argument("--kind", choices=("two-box", "random"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-objects", type=int, default=5)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("generate", help="generate candidate records from a scene")
    p.add_argument("--scene", required=True, help="scene descriptor path")
    p.add_argument("--out", required=True, help="output directory for manifest + images")
    p.add_argument("--threshold", type=float, default=1.2, help="amodal/modal area selection threshold")
    p.add_argument("--boundary-radius", type=int, default=1)
    p.add_argument("--min-area", type=int, default=16)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--gt", required=True, help="manifest path")
    p.add_argument("--pred", required=True, help="prediction file path")
    p.add_argument("--bin-width", type=float, default=0.05)
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("stats", help="statistics over accepted records")
    p.add_argument("--gt", required=True, help="manifest path")
    p.add_argument("--bin-width", type=float, default=0.05)
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("serve", help="start the curation service")
    p.add_argument("--data", default=None, help="data directory (default: $AMODAL_DATA_DIR)")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui", default=None, help="directory of built review-UI assets to serve at /")

    return parser


def cmd_synth(args) -> int:
    out = Path(args.out)
    if args.kind == "two-box":
        scene, _, _ = make_two_box_scene()
    else:
        scene = make_random_scene(args.seed, args.n_objects)
    path = save_scene(scene, out / "scene.json")
    print(path)
    return 0


def _visualization_png(ids: np.ndarray) -> bytes:
    from PIL import Image

    rgb = np.zeros((*ids.shape, 3), dtype=np.uint8)
    for instance_id in np.unique(ids):
        if instance_id == 0:
            continue
        rgb[ids == instance_id] = _VIS_PALETTE[(int(instance_id) - 1) % len(_VIS_PALETTE)]
    buf = io.BytesIO()
    Image.fromarray(rgb).save(buf, format="PNG")
    return buf.getvalue()


def cmd_generate(args) -> int:
    scene = load_scene(args.scene)
    if not scene.cameras:
        print("error: scene has no cameras", file=sys.stderr)
        return 1
    config = GenerationConfig(
        selection_threshold=args.threshold,
        boundary_radius=args.boundary_radius,
        min_amodal_area=args.min_area,
    )
    out = Path(args.out)
    (out / "images").mkdir(parents=True, exist_ok=True)

    images = []
    records = []
    for camera_id, camera in scene.cameras:
        image_id = f"{scene.scene_id}_{camera_id}"
        ids, _ = rasterize_joint(scene, camera)
        rel_path = f"images/{image_id}.png"
        (out / rel_path).write_bytes(_visualization_png(ids))
        images.append(
            ImageInfo(
                image_id=image_id,
                scene_id=scene.scene_id,
                camera_id=camera_id,
                width=camera.width,
                height=camera.height,
                file_path=rel_path,
            )
        )
        records.extend(build_records(scene, camera, image_id, config))

    manifest = DatasetManifest(images=images, records=records, splits={})
    save_manifest(manifest, out / "manifest.json")
    print(f"{out / 'manifest.json'}: {len(records)} records over {len(images)} images")
    return 0


def _format_report(doc: dict, indent: str = "") -> str:
    lines = []
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_format_report(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                lines.append(indent + "  - " + ", ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
        else:
            lines.append(f"{indent}{key}: {_fmt(value)}")
    return "\n".join(lines)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6f}"
    return value


def cmd_eval(args) -> int:
    manifest = import_manifest(args.gt)
    predictions = read_predictions(args.pred)
    pairs = []
    for record_id, rle in sorted(predictions, key=lambda kv: kv[0]):
        try:
            record = manifest.record_by_id(record_id)
        except KeyError:
            print(f"error: prediction references unknown record {record_id!r}", file=sys.stderr)
            return 1
        pairs.append(
            EvalPair(
                record_id=record_id,
                gt_modal=record.modal,
                gt_amodal=record.amodal,
                predicted_amodal=rle_decode(rle),
                category=record.category,
            )
        )
    report = evaluate(pairs, bin_width=args.bin_width)
    doc = report.to_json()
    print(json.dumps(doc, indent=2, sort_keys=True) if args.as_json else _format_report(doc))
    return 0


def cmd_stats(args) -> int:
    manifest = import_manifest(args.gt)
    report = dataset_stats(manifest, bin_width=args.bin_width)
    doc = report.to_json()
    print(json.dumps(doc, indent=2, sort_keys=True) if args.as_json else _format_report(doc))
    return 0


def cmd_serve(args) -> int:
    from .server import run_server

    run_server(args.data, port=args.port, ui_dir=args.ui)
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "generate": cmd_generate,
    "eval": cmd_eval,
    "stats": cmd_stats,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except (SceneLoadError, ManifestError, CurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
