"""Evaluation metrics for amodal completion and dataset statistics.

Mean IoU compares predicted and ground-truth amodal masks directly.
The inverse variant restricts both masks to the region outside the
ground-truth modal mask before computing IoU, so it scores exclusively
how well the occluded part was recovered: a prediction that never leaves
the modal mask scores exactly 0 regardless of how good the visible
segmentation is. Pairs whose ground truth has no occluded region are
excluded from the inverse mean (the quantity is 0/0 there).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .masks import mask_area, mask_iou


@dataclass(frozen=True)
class EvalPair:
    """One instance to score: ground-truth modal/amodal plus the predicted amodal."""

    record_id: str
    gt_modal: np.ndarray
    gt_amodal: np.ndarray
    predicted_amodal: np.ndarray
    category: str = ""

    def __post_init__(self):
        if not (self.gt_modal.shape == self.gt_amodal.shape == self.predicted_amodal.shape):
            raise ValueError(f"{self.record_id}: mask dimensions differ")
        if np.any(self.gt_modal & ~self.gt_amodal):
            raise ValueError(f"{self.record_id}: gt_modal is not contained in gt_amodal")

    @property
    def gt_ratio(self) -> float:
        area = mask_area(self.gt_amodal)
        if area == 0:
            return 0.0
        return (area - mask_area(self.gt_modal)) / area


def pair_iou(pair: EvalPair) -> float:
    return mask_iou(pair.predicted_amodal, pair.gt_amodal)


def pair_iou_inv(pair: EvalPair) -> float | None:
    """IoU outside the modal mask; None when the ground truth has no occluded region."""
    hidden = pair.gt_amodal & ~pair.gt_modal
    if not hidden.any():
        return None
    return mask_iou(pair.predicted_amodal & ~pair.gt_modal, hidden)


def miou(pairs: list[EvalPair]) -> float:
    """Mean IoU between predicted and ground-truth amodal masks."""
    if not pairs:
        raise ValueError("miou of an empty pair list")
    return sum(pair_iou(p) for p in pairs) / len(pairs)


def miou_inv(pairs: list[EvalPair]) -> float:
    """Mean IoU over the occluded regions only."""
    if not pairs:
        raise ValueError("miou_inv of an empty pair list")
    values = [v for v in (pair_iou_inv(p) for p in pairs) if v is not None]
    if not values:
        raise ValueError("miou_inv undefined: no pair has an occluded region")
    return sum(values) / len(values)


@dataclass
class GroupScores:
    n: int
    miou: float
    miou_inv: float | None
    n_inv: int

    def to_json(self) -> dict:
        return {"n": self.n, "miou": self.miou, "miou_inv": self.miou_inv, "n_inv": self.n_inv}


@dataclass
class MetricsReport:
    n: int
    miou: float
    miou_inv: float
    n_inv: int
    per_category: dict[str, GroupScores] = field(default_factory=dict)
    per_ratio_bin: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "n_inv": self.n_inv,
            "miou": self.miou,
            "miou_inv": self.miou_inv,
            "per_category": {k: v.to_json() for k, v in sorted(self.per_category.items())},
            "per_ratio_bin": self.per_ratio_bin,
        }


def _group_scores(pairs: list[EvalPair]) -> GroupScores:
    ious = [pair_iou(p) for p in pairs]
    invs = [v for v in (pair_iou_inv(p) for p in pairs) if v is not None]
    return GroupScores(
        n=len(pairs),
        miou=sum(ious) / len(ious),
        miou_inv=sum(invs) / len(invs) if invs else None,
        n_inv=len(invs),
    )


def ratio_bin_index(ratio: float, bin_width: float) -> int:
    """Index of the half-open bin [k*w, (k+1)*w) containing ratio; last bin closed at 1."""
    n_bins = int(np.ceil(1.0 / bin_width))
    idx = int(ratio / bin_width)
    # repair float division against the actual bin edges
    if (idx + 1) * bin_width <= ratio:
        idx += 1
    elif idx * bin_width > ratio:
        idx -= 1
    return min(max(idx, 0), n_bins - 1)


def evaluate(pairs: list[EvalPair], bin_width: float = 0.05) -> MetricsReport:
    """Score a list of pairs, with per-category and per-occlusion-ratio breakdowns."""
    if not (0.0 < bin_width <= 1.0):
        raise ValueError(f"bin width must be in (0, 1], got {bin_width}")
    overall = _group_scores(pairs) if pairs else None
    if overall is None:
        raise ValueError("nothing to evaluate")

    by_category: dict[str, list[EvalPair]] = {}
    for p in pairs:
        by_category.setdefault(p.category, []).append(p)

    n_bins = int(np.ceil(1.0 / bin_width))
    by_bin: dict[int, list[EvalPair]] = {}
    for p in pairs:
        by_bin.setdefault(ratio_bin_index(p.gt_ratio, bin_width), []).append(p)
    per_bin = []
    for k in range(n_bins):
        if k not in by_bin:
            continue
        scores = _group_scores(by_bin[k])
        per_bin.append(
            {
                "lo": k * bin_width,
                "hi": min((k + 1) * bin_width, 1.0),
                **scores.to_json(),
            }
        )

    return MetricsReport(
        n=overall.n,
        miou=overall.miou,
        miou_inv=miou_inv(pairs),
        n_inv=overall.n_inv,
        per_category={k: _group_scores(v) for k, v in by_category.items()},
        per_ratio_bin=per_bin,
    )


def identity_baseline(pairs: list[EvalPair], bin_width: float = 0.05) -> MetricsReport:
    """Score the no-op completion (predicted amodal := ground-truth modal).

    By construction its mIoU is the mean modal/amodal area ratio and its
    inverse mIoU is exactly 0. Raises when no pair is occluded, like
    miou_inv.
    """
    if not pairs:
        raise ValueError("nothing to evaluate")
    return evaluate([replace(p, predicted_amodal=p.gt_modal) for p in pairs], bin_width=bin_width)


@dataclass
class StatsReport:
    n_images: int
    n_instances: int
    per_category_counts: dict[str, int]
    bin_width: float
    ratio_histogram: list[int]

    def to_json(self) -> dict:
        return {
            "n_images": self.n_images,
            "n_instances": self.n_instances,
            "per_category": dict(sorted(self.per_category_counts.items())),
            "ratio_histogram": {"bin_width": self.bin_width, "counts": self.ratio_histogram},
        }


def dataset_stats(manifest, bin_width: float = 0.05) -> StatsReport:
    """Counts over the accepted records of a manifest.

    Only records whose curation status is "accepted" constitute the final
    dataset; the histogram bins their occlusion ratios so that the counts
    sum to the number of accepted instances.
    """
    if not (0.0 < bin_width <= 1.0):
        raise ValueError(f"bin width must be in (0, 1], got {bin_width}")
    n_bins = int(np.ceil(1.0 / bin_width))
    histogram = [0] * n_bins
    per_category: dict[str, int] = {}
    n_instances = 0
    for record in manifest.records:
        if record.curation_status != "accepted":
            continue
        n_instances += 1
        per_category[record.category] = per_category.get(record.category, 0) + 1
        histogram[ratio_bin_index(record.occlusion_ratio, bin_width)] += 1
    return StatsReport(
        n_images=len(manifest.images),
        n_instances=n_instances,
        per_category_counts=per_category,
        bin_width=bin_width,
        ratio_histogram=histogram,
    )
