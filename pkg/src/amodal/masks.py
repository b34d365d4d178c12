"""Binary mask algebra and the run-length codec used for storage and metrics.

A mask is an H x W numpy bool array (row 0 = top of the image). The
run-length encoding scans the mask column-major (all rows of column 0,
then column 1, ...) and stores the lengths of alternating zero/one runs,
always starting with a zero run. This matches the COCO uncompressed
convention, so exported annotations interoperate with existing
segmentation tooling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_mask(a) -> np.ndarray:
    """Coerce input to a 2D bool array with positive dimensions."""
    m = np.asarray(a, dtype=bool)
    if m.ndim != 2 or m.shape[0] <= 0 or m.shape[1] <= 0:
        raise ValueError(f"mask must be 2D with positive dimensions, got shape {m.shape}")
    return m


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"mask dimensions differ: {a.shape} vs {b.shape}")


def mask_area(mask: np.ndarray) -> int:
    """Number of 1-pixels."""
    return int(np.count_nonzero(as_mask(mask)))


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two masks of matching dimensions.

    Two empty masks have IoU 1.0 (perfect agreement on emptiness).
    """
    a, b = as_mask(a), as_mask(b)
    _check_same_shape(a, b)
    union = int(np.count_nonzero(a | b))
    if union == 0:
        return 1.0
    inter = int(np.count_nonzero(a & b))
    return inter / union


def mask_union(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_mask(a), as_mask(b)
    _check_same_shape(a, b)
    return a | b


def mask_intersection(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_mask(a), as_mask(b)
    _check_same_shape(a, b)
    return a & b


def mask_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pixels of a not in b."""
    a, b = as_mask(a), as_mask(b)
    _check_same_shape(a, b)
    return a & ~b


@dataclass(frozen=True)
class RunLengthEncoding:
    """Column-major run-length encoding of a binary mask.

    counts alternates zero-run/one-run lengths starting with a zero run
    (which may be 0 when the first pixel is set); the counts sum to
    width * height.
    """

    width: int
    height: int
    counts: tuple[int, ...]

    def to_json(self) -> dict:
        """Serialized form; field names and the [height, width] order are normative."""
        return {"size": [self.height, self.width], "counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj: dict) -> "RunLengthEncoding":
        try:
            height, width = obj["size"]
            counts = tuple(int(c) for c in obj["counts"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed RLE object: {obj!r}") from exc
        return cls(width=int(width), height=int(height), counts=counts)


def rle_encode(mask: np.ndarray) -> RunLengthEncoding:
    """Encode a mask as alternating run lengths in column-major scan order."""
    mask = as_mask(mask)
    height, width = mask.shape
    flat = mask.flatten(order="F")
    # boundaries between runs of equal values
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    edges = np.concatenate(([0], change, [flat.size]))
    counts = np.diff(edges).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return RunLengthEncoding(width=width, height=height, counts=tuple(int(c) for c in counts))


def rle_decode(rle: RunLengthEncoding) -> np.ndarray:
    """Inverse of rle_encode. Raises ValueError on malformed counts."""
    total = rle.width * rle.height
    counts = rle.counts
    if any(c < 0 for c in counts):
        raise ValueError("RLE counts must be non-negative")
    if any(c == 0 for c in counts[1:]):
        raise ValueError("RLE counts may only contain a zero in the leading position")
    if sum(counts) != total:
        raise ValueError(
            f"RLE counts sum to {sum(counts)}, expected width*height = {total}"
        )
    values = np.resize(np.array([0, 1], dtype=bool), len(counts))
    flat = np.repeat(values, counts)
    return flat.reshape((rle.height, rle.width), order="F")


def boundary_band(inner: np.ndarray, outer: np.ndarray, radius: int) -> np.ndarray:
    """Pixels of `inner` within 4-connected distance <= radius of a pixel of `outer`.

    Implemented as `radius` iterations of a 4-neighbour dilation of
    `outer`, intersected with `inner`.
    """
    inner, outer = as_mask(inner), as_mask(outer)
    _check_same_shape(inner, outer)
    if radius < 1:
        raise ValueError(f"radius must be positive, got {radius}")
    reach = outer.copy()
    for _ in range(radius):
        grown = reach.copy()
        grown[1:, :] |= reach[:-1, :]
        grown[:-1, :] |= reach[1:, :]
        grown[:, 1:] |= reach[:, :-1]
        grown[:, :-1] |= reach[:, 1:]
        reach = grown
    return inner & reach
