import numpy as np
import pytest

from amodal.masks import mask_area
from amodal.pipeline import (
    GenerationConfig,
    build_records,
    derive_occluder,
    generate_amodal_masks,
    generate_modal_masks,
    is_occluded_selected,
    occlusion_boundary,
    occlusion_ratio,
)
from amodal.scene import Scene, SceneObject
from amodal.synth import identity_camera, make_random_scene, make_two_box_scene, quad_mesh


@pytest.fixture(scope="module")
def two_box():
    return make_two_box_scene()


def rect_mask(h, w, r0, r1, c0, c1):
    m = np.zeros((h, w), dtype=bool)
    m[r0:r1, c0:c1] = True
    return m


def three_box_scene():
    """Two front quads each hiding part of one large back quad."""
    cam = identity_camera(100, 100, 100.0, near=0.1, far=10.0)
    back = SceneObject(
        instance_id=3, semantic_label="sofa 3", category="sofa",
        mesh=quad_mesh((0.0, 0.0, 2.0), 0.5, 0.5),
    )
    left = SceneObject(
        instance_id=1, semantic_label="chair 1", category="chair",
        mesh=quad_mesh((-0.125, 0.0, 1.0), 0.125, 0.25),
    )
    right = SceneObject(
        instance_id=2, semantic_label="chair 2", category="chair",
        mesh=quad_mesh((0.125, 0.0, 1.0), 0.125, 0.25),
    )
    return Scene(scene_id="three_box", objects=(left, right, back), cameras=(("cam0", cam),)), cam


class TestMaskGeneration:
    def test_empty_scene(self):
        cam = identity_camera(10, 10, 10.0)
        scene = Scene(scene_id="s", cameras=(("c", cam),))
        assert generate_modal_masks(scene, cam) == {}
        assert generate_amodal_masks(scene, cam) == {}

    def test_single_object_modal_equals_amodal(self):
        cam = identity_camera(100, 100, 100.0)
        obj = SceneObject(
            instance_id=1, semantic_label="sq", category="sq",
            mesh=quad_mesh((0.0, 0.0, 2.0), 0.5, 0.5),
        )
        scene = Scene(scene_id="s", objects=(obj,), cameras=(("c", cam),))
        modal = generate_modal_masks(scene, cam)[1]
        amodal = generate_amodal_masks(scene, cam)[1]
        assert mask_area(modal) == 2500
        assert np.array_equal(modal, amodal)

    def test_two_box_areas(self, two_box):
        scene, cam, _ = two_box
        modal = generate_modal_masks(scene, cam)
        amodal = generate_amodal_masks(scene, cam)
        assert mask_area(modal[2]) == 1250
        assert mask_area(amodal[2]) == 2500
        assert mask_area(modal[1]) == 1250
        assert mask_area(amodal[1]) == 1250

    def test_modal_masks_partition_coverage(self):
        scene = make_random_scene(11, 5)
        cam = scene.cameras[0][1]
        modal = generate_modal_masks(scene, cam)
        total = np.zeros((cam.height, cam.width), dtype=int)
        for m in modal.values():
            total += m
        assert total.max() <= 1  # pairwise disjoint
        from amodal.rasterize import rasterize_joint

        ids, _ = rasterize_joint(scene, cam)
        assert np.array_equal(total.astype(bool), ids != 0)

    def test_hidden_region_explained_by_occluders(self):
        scene = make_random_scene(13, 5)
        cam = scene.cameras[0][1]
        modal = generate_modal_masks(scene, cam)
        amodal = generate_amodal_masks(scene, cam)
        for i in modal:
            hidden = amodal[i] & ~modal[i]
            others = np.zeros_like(hidden)
            for j, mj in modal.items():
                if j != i:
                    others |= mj
            assert not (hidden & ~others).any()


class TestSelection:
    def test_two_box_selected(self):
        modal = rect_mask(100, 100, 25, 75, 50, 75)
        amodal = rect_mask(100, 100, 25, 75, 25, 75)
        assert is_occluded_selected(modal, amodal, 1.2)

    def test_identical_not_selected(self):
        m = rect_mask(10, 10, 0, 5, 0, 5)
        assert not is_occluded_selected(m, m, 1.2)
        assert not is_occluded_selected(m, m, 1.01)

    def test_exact_threshold_not_selected(self):
        # areas 120 vs 100: equality fails the strict inequality
        modal = rect_mask(20, 20, 0, 10, 0, 10)
        amodal = rect_mask(20, 20, 0, 10, 0, 12)
        assert mask_area(modal) == 100 and mask_area(amodal) == 120
        assert not is_occluded_selected(modal, amodal, 1.2)

    def test_subset_precondition(self):
        a = rect_mask(10, 10, 0, 5, 0, 5)
        b = rect_mask(10, 10, 5, 10, 5, 10)
        with pytest.raises(ValueError):
            is_occluded_selected(a, b, 1.2)

    def test_equivalence_with_ratio_threshold(self):
        # selection at threshold t is the same test as ratio > 1 - 1/t
        rng = np.random.default_rng(0)
        for _ in range(300):
            amodal = rng.random((16, 16)) < rng.random()
            modal = amodal & (rng.random((16, 16)) < rng.random())
            if mask_area(amodal) == 0:
                continue
            selected = is_occluded_selected(modal, amodal, 1.2)
            assert selected == (occlusion_ratio(modal, amodal) > 1 / 6)


class TestRatio:
    def test_unoccluded_zero(self):
        m = rect_mask(10, 10, 0, 5, 0, 5)
        assert occlusion_ratio(m, m) == 0.0

    def test_two_box_half(self, two_box):
        scene, cam, _ = two_box
        modal = generate_modal_masks(scene, cam)[2]
        amodal = generate_amodal_masks(scene, cam)[2]
        assert occlusion_ratio(modal, amodal) == 0.5

    def test_half_occluded_rectangle(self):
        # a rectangle whose left half is hidden is 50% occluded
        amodal = rect_mask(40, 60, 10, 30, 10, 50)
        modal = rect_mask(40, 60, 10, 30, 30, 50)
        assert occlusion_ratio(modal, amodal) == 0.5

    def test_empty_amodal_rejected(self):
        z = np.zeros((5, 5), dtype=bool)
        with pytest.raises(ValueError):
            occlusion_ratio(z, z)


class TestOccluder:
    def test_unoccluded_empty(self):
        modal = {1: rect_mask(10, 10, 0, 5, 0, 5), 2: rect_mask(10, 10, 6, 9, 6, 9)}
        occ = derive_occluder(1, modal, modal[1])
        assert not occ.any()

    def test_two_box_front_is_occluder(self, two_box):
        scene, cam, _ = two_box
        modal = generate_modal_masks(scene, cam)
        amodal = generate_amodal_masks(scene, cam)[2]
        occ = derive_occluder(2, modal, amodal)
        assert np.array_equal(occ, modal[1])

    def test_three_box_union(self):
        scene, cam = three_box_scene()
        modal = generate_modal_masks(scene, cam)
        amodal = generate_amodal_masks(scene, cam)[3]
        occ = derive_occluder(3, modal, amodal)
        assert np.array_equal(occ, modal[1] | modal[2])
        assert mask_area(occ) == 2500  # both front quads fully visible

    def test_never_self_occluding(self):
        scene = make_random_scene(17, 5)
        cam = scene.cameras[0][1]
        modal = generate_modal_masks(scene, cam)
        amodal = generate_amodal_masks(scene, cam)
        for i in modal:
            occ = derive_occluder(i, modal, amodal[i])
            assert not (occ & modal[i]).any()
            hidden = amodal[i] & ~modal[i]
            assert not (hidden & ~occ).any()  # hidden region inside the occluder

    def test_missing_target(self):
        with pytest.raises(ValueError):
            derive_occluder(9, {1: rect_mask(5, 5, 0, 2, 0, 2)}, rect_mask(5, 5, 0, 2, 0, 2))


class TestBoundary:
    def test_empty_occluder(self):
        modal = rect_mask(10, 10, 0, 10, 0, 10)
        assert not occlusion_boundary(modal, np.zeros_like(modal), 1).any()

    def test_two_box_radius_1(self, two_box):
        scene, cam, _ = two_box
        modal = generate_modal_masks(scene, cam)
        band = occlusion_boundary(modal[2], modal[1], 1)
        assert mask_area(band) == 50
        assert np.array_equal(band, rect_mask(100, 100, 25, 75, 50, 51))

    def test_two_box_radius_2(self, two_box):
        scene, cam, _ = two_box
        modal = generate_modal_masks(scene, cam)
        band = occlusion_boundary(modal[2], modal[1], 2)
        assert mask_area(band) == 100


class TestBuildRecords:
    def test_no_occlusion_no_records(self):
        cam = identity_camera(100, 100, 100.0)
        obj = SceneObject(
            instance_id=1, semantic_label="sq", category="sq",
            mesh=quad_mesh((0.0, 0.0, 2.0), 0.5, 0.5),
        )
        scene = Scene(scene_id="s", objects=(obj,), cameras=(("c", cam),))
        assert build_records(scene, cam, "img") == []

    def test_two_box_one_record(self, two_box):
        scene, cam, truth = two_box
        records = build_records(scene, cam, "img0")
        assert len(records) == 1
        rec = records[0]
        assert rec.instance_id == 2
        assert rec.record_id == "img0:000002"
        assert mask_area(rec.modal) == 1250
        assert mask_area(rec.amodal) == 2500
        assert rec.occlusion_ratio == 0.5
        assert rec.auto_selected is True
        assert rec.curation_status == "pending"
        assert (rec.modal & ~rec.amodal).sum() == 0
        assert (rec.boundary & ~rec.modal).sum() == 0

    def test_high_threshold_empty(self, two_box):
        scene, cam, _ = two_box
        records = build_records(scene, cam, "img0", GenerationConfig(selection_threshold=3.0))
        assert records == []

    def test_min_area_filter(self, two_box):
        scene, cam, _ = two_box
        records = build_records(scene, cam, "img0", GenerationConfig(min_amodal_area=3000))
        assert records == []

    def test_records_sorted_by_instance(self):
        scene, cam = three_box_scene()
        # push the back quad further so both fronts occlude it; add another occluded object
        records = build_records(scene, cam, "img")
        ids = [r.instance_id for r in records]
        assert ids == sorted(ids)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GenerationConfig(selection_threshold=1.0)
        with pytest.raises(ValueError):
            GenerationConfig(boundary_radius=0)
        with pytest.raises(ValueError):
            GenerationConfig(min_amodal_area=-1)
