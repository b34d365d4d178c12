import itertools

import numpy as np
import pytest

from amodal.masks import (
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


def square_mask(h, w, r0, r1, c0, c1):
    m = np.zeros((h, w), dtype=bool)
    m[r0:r1, c0:c1] = True
    return m


class TestArea:
    def test_all_zero(self):
        assert mask_area(np.zeros((4, 4), dtype=bool)) == 0

    def test_all_one(self):
        assert mask_area(np.ones((4, 4), dtype=bool)) == 16

    def test_projected_square(self):
        # 50x50 block, the footprint of the analytic unit-square projection
        assert mask_area(square_mask(100, 100, 25, 75, 25, 75)) == 2500


class TestIou:
    def test_identical(self):
        m = square_mask(10, 10, 2, 8, 2, 8)
        assert mask_iou(m, m) == 1.0

    def test_disjoint(self):
        a = square_mask(10, 10, 0, 5, 0, 10)
        b = square_mask(10, 10, 5, 10, 0, 10)
        assert mask_iou(a, b) == 0.0

    def test_half_shift(self):
        # 2500-px square against itself shifted so the overlap is 1250 px
        a = square_mask(100, 100, 25, 75, 25, 75)
        b = square_mask(100, 100, 25, 75, 50, 100)
        assert mask_iou(a, b) == pytest.approx(1250 / 3750)

    def test_both_empty(self):
        z = np.zeros((3, 3), dtype=bool)
        assert mask_iou(z, z) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mask_iou(np.zeros((2, 2), dtype=bool), np.zeros((3, 3), dtype=bool))

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = rng.random((8, 8)) < 0.4
            b = rng.random((8, 8)) < 0.4
            v = mask_iou(a, b)
            assert v == mask_iou(b, a)
            assert 0.0 <= v <= 1.0


class TestSetOps:
    def test_self_difference_empty(self):
        a = square_mask(6, 6, 1, 5, 1, 5)
        assert mask_area(mask_difference(a, a)) == 0

    def test_union_with_empty(self):
        a = square_mask(6, 6, 1, 5, 1, 5)
        out = mask_union(a, np.zeros_like(a))
        assert np.array_equal(out, a)

    def test_square_minus_left_half(self):
        square = square_mask(100, 100, 25, 75, 25, 75)
        left = square_mask(100, 100, 0, 100, 0, 50)
        right_half = mask_difference(square, left)
        assert mask_area(right_half) == 1250
        assert np.array_equal(right_half, square_mask(100, 100, 25, 75, 50, 75))

    def test_inclusion_exclusion(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = rng.random((9, 7)) < 0.5
            b = rng.random((9, 7)) < 0.5
            assert mask_area(mask_union(a, b)) + mask_area(mask_intersection(a, b)) == mask_area(
                a
            ) + mask_area(b)


class TestRle:
    def test_all_zero_2x2(self):
        rle = rle_encode(np.zeros((2, 2), dtype=bool))
        assert rle.counts == (4,)

    def test_all_one_2x2(self):
        rle = rle_encode(np.ones((2, 2), dtype=bool))
        assert rle.counts == (0, 4)

    def test_single_pixel_vector(self):
        # scan order r0c0, r1c0, r0c1, r1c1 = 0,1,0,0
        m = np.zeros((2, 2), dtype=bool)
        m[1, 0] = True
        rle = rle_encode(m)
        assert rle.counts == (1, 1, 2)
        assert np.array_equal(rle_decode(rle), m)

    def test_decode_counts_4(self):
        out = rle_decode(RunLengthEncoding(width=2, height=2, counts=(4,)))
        assert not out.any()

    def test_decode_sum_mismatch(self):
        with pytest.raises(ValueError):
            rle_decode(RunLengthEncoding(width=2, height=2, counts=(3,)))

    def test_decode_rejects_interior_zero(self):
        with pytest.raises(ValueError):
            rle_decode(RunLengthEncoding(width=2, height=2, counts=(1, 0, 3)))

    def test_roundtrip_exhaustive_3x3(self):
        for bits in itertools.product((0, 1), repeat=9):
            m = np.array(bits, dtype=bool).reshape(3, 3)
            assert np.array_equal(rle_decode(rle_encode(m)), m)

    def test_roundtrip_random_64x64(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            m = rng.random((64, 64)) < rng.random()
            assert np.array_equal(rle_decode(rle_encode(m)), m)

    def test_encoding_stable(self):
        rng = np.random.default_rng(5)
        m = rng.random((32, 32)) < 0.5
        assert rle_encode(m) == rle_encode(m.copy())

    def test_json_roundtrip(self):
        m = np.eye(4, dtype=bool)
        rle = rle_encode(m)
        doc = rle.to_json()
        assert doc["size"] == [4, 4]
        assert RunLengthEncoding.from_json(doc) == rle

    def test_identity_vector_shared_with_review_ui(self):
        # same test vector asserted by the review frontend's decoder tests
        assert rle_encode(np.eye(4, dtype=bool)).counts == (0, 1, 4, 1, 4, 1, 4, 1)


class TestBoundaryBand:
    def test_empty_outer(self):
        inner = np.ones((5, 5), dtype=bool)
        assert not boundary_band(inner, np.zeros_like(inner), 1).any()

    def test_halves_radius_1(self):
        inner = square_mask(10, 10, 0, 10, 0, 5)
        outer = square_mask(10, 10, 0, 10, 5, 10)
        band = boundary_band(inner, outer, 1)
        assert mask_area(band) == 10
        assert np.array_equal(band, square_mask(10, 10, 0, 10, 4, 5))

    def test_halves_radius_2(self):
        inner = square_mask(10, 10, 0, 10, 0, 5)
        outer = square_mask(10, 10, 0, 10, 5, 10)
        band = boundary_band(inner, outer, 2)
        assert mask_area(band) == 20
        assert np.array_equal(band, square_mask(10, 10, 0, 10, 3, 5))

    def test_four_connectivity(self):
        # a diagonal neighbour is at 4-distance 2, not 1
        inner = np.zeros((3, 3), dtype=bool)
        inner[0, 0] = True
        outer = np.zeros((3, 3), dtype=bool)
        outer[1, 1] = True
        assert not boundary_band(inner, outer, 1).any()
        assert boundary_band(inner, outer, 2)[0, 0]

    def test_radius_must_be_positive(self):
        m = np.zeros((2, 2), dtype=bool)
        with pytest.raises(ValueError):
            boundary_band(m, m, 0)
