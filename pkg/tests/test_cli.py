import json

import numpy as np
import pytest

from amodal.cli import main
from amodal.manifest import import_manifest, write_predictions
from amodal.masks import mask_area, rle_encode
from amodal.sceneio import load_scene


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def two_box_dir(tmp_path, capsys):
    out = tmp_path / "scene"
    code, _, _ = run_cli(capsys, "synth", "--kind", "two-box", "--out", str(out))
    assert code == 0
    return out


@pytest.fixture
def generated(two_box_dir, tmp_path, capsys):
    out = tmp_path / "dataset"
    code, _, _ = run_cli(capsys, "generate", "--scene", str(two_box_dir / "scene.json"), "--out", str(out))
    assert code == 0
    return out


class TestSynth:
    def test_two_box_scene_written(self, two_box_dir):
        scene = load_scene(two_box_dir / "scene.json")
        assert [o.instance_id for o in scene.objects] == [1, 2]

    def test_random_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(capsys, "synth", "--kind", "random", "--seed", "3", "--out", str(a))[0] == 0
        assert run_cli(capsys, "synth", "--kind", "random", "--seed", "3", "--out", str(b))[0] == 0
        assert (a / "scene.json").read_bytes() == (b / "scene.json").read_bytes()


class TestGenerate:
    def test_manifest_contents(self, generated):
        manifest = import_manifest(generated / "manifest.json")
        assert len(manifest.records) == 1
        rec = manifest.records[0]
        assert mask_area(rec.modal) == 1250
        assert mask_area(rec.amodal) == 2500
        assert rec.occlusion_ratio == 0.5
        img = manifest.images[0]
        assert img.file_path and (generated / img.file_path).exists()

    def test_byte_identical_runs(self, two_box_dir, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        scene = str(two_box_dir / "scene.json")
        assert run_cli(capsys, "generate", "--scene", scene, "--out", str(a))[0] == 0
        assert run_cli(capsys, "generate", "--scene", scene, "--out", str(b))[0] == 0
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
        img = "images/two_box_cam0.png"
        assert (a / img).read_bytes() == (b / img).read_bytes()

    def test_threshold_flag(self, two_box_dir, tmp_path, capsys):
        out = tmp_path / "strict"
        code, _, _ = run_cli(
            capsys, "generate", "--scene", str(two_box_dir / "scene.json"),
            "--out", str(out), "--threshold", "3.0",
        )
        assert code == 0
        assert import_manifest(out / "manifest.json").records == []

    def test_missing_scene_is_io_error(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "generate", "--scene", str(tmp_path / "no.json"), "--out", str(tmp_path / "o"))
        assert code == 2


class TestEval:
    def _write_predictions(self, generated, tmp_path, use_mask):
        manifest = import_manifest(generated / "manifest.json")
        rec = manifest.records[0]
        pred_path = tmp_path / "pred.json"
        write_predictions([(rec.record_id, rle_encode(use_mask(rec)))], pred_path)
        return pred_path

    def test_perfect_predictions(self, generated, tmp_path, capsys):
        pred = self._write_predictions(generated, tmp_path, lambda r: r.amodal)
        code, out, _ = run_cli(
            capsys, "eval", "--gt", str(generated / "manifest.json"), "--pred", str(pred), "--json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["miou"] == 1.0
        assert doc["miou_inv"] == 1.0

    def test_identity_predictions(self, generated, tmp_path, capsys):
        pred = self._write_predictions(generated, tmp_path, lambda r: r.modal)
        code, out, _ = run_cli(
            capsys, "eval", "--gt", str(generated / "manifest.json"), "--pred", str(pred), "--json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["miou"] == 0.5
        assert doc["miou_inv"] == 0.0

    def test_text_output(self, generated, tmp_path, capsys):
        pred = self._write_predictions(generated, tmp_path, lambda r: r.amodal)
        code, out, _ = run_cli(capsys, "eval", "--gt", str(generated / "manifest.json"), "--pred", str(pred))
        assert code == 0
        assert "miou: 1.000000" in out

    def test_unknown_record_fails(self, generated, tmp_path, capsys):
        pred_path = tmp_path / "pred.json"
        write_predictions([("bogus", rle_encode(np.zeros((100, 100), dtype=bool)))], pred_path)
        code, _, err = run_cli(
            capsys, "eval", "--gt", str(generated / "manifest.json"), "--pred", str(pred_path)
        )
        assert code == 1
        assert "bogus" in err


class TestStats:
    def test_stats_json(self, generated, tmp_path, capsys):
        # accept the single record first
        manifest = import_manifest(generated / "manifest.json")
        manifest.records[0].curation_status = "accepted"
        from amodal.manifest import save_manifest

        save_manifest(manifest, generated / "manifest.json")
        code, out, _ = run_cli(capsys, "stats", "--gt", str(generated / "manifest.json"), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["n_instances"] == 1
        assert doc["per_category"] == {"chair": 1}
        assert doc["ratio_histogram"]["counts"][10] == 1


class TestExitCodes:
    def test_unknown_flag_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "stats", "--nope")
        assert code == 64
        assert "usage" in err.lower()

    def test_unknown_command_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "frobnicate")
        assert code == 64

    def test_validation_error_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "manifest.json"
        bad.write_text("{}")
        pred = tmp_path / "pred.json"
        pred.write_text("[]")
        code, _, _ = run_cli(capsys, "eval", "--gt", str(bad), "--pred", str(pred))
        assert code == 1  # empty prediction list -> nothing to evaluate
