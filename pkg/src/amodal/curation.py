"""Two-round manual selection workflow over generated records.

Round 1 puts every auto-selected record in front of an annotator for a
Yes/No quality verdict; round 2 re-filters the round-1 "yes" set. A
record enters the final dataset only with a yes in both rounds.

All verdicts land in an append-only log; the effective verdict for a
(record, round) is the decision with the latest timestamp, with a total
order on decision content breaking timestamp ties, so replaying the log
in any arrival order reconstructs the same state. Nothing else is
persisted: crash recovery is replay.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .manifest import DatasetManifest
from .pipeline import AmodalRecord

ROUNDS = (1, 2)
VERDICTS = ("yes", "no")

# quality-failure categories offered as optional tags on "no" verdicts;
# metadata only, they never affect acceptance
NO_VERDICT_TAGS = (
    "modal_missing_visible_parts",
    "amodal_noisy",
    "amodal_incomplete",
    "other",
)


class CurationError(Exception):
    """Raised for invalid decisions (unknown record, out-of-order round 2, ...)."""


@dataclass(frozen=True)
class CurationDecision:
    record_id: str
    round: int
    verdict: str
    annotator_id: str
    timestamp_ms: int
    tags: tuple[str, ...] = ()

    def sort_key(self):
        # total order on content: latest timestamp wins, remaining fields
        # only break exact timestamp collisions deterministically
        return (self.timestamp_ms, self.annotator_id, self.verdict, self.tags)

    def to_json(self) -> dict:
        return {
            "record_id": self.record_id,
            "round": self.round,
            "verdict": self.verdict,
            "annotator_id": self.annotator_id,
            "timestamp_ms": self.timestamp_ms,
            "tags": list(self.tags),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CurationDecision":
        try:
            return cls(
                record_id=str(doc["record_id"]),
                round=int(doc["round"]),
                verdict=str(doc["verdict"]),
                annotator_id=str(doc["annotator_id"]),
                timestamp_ms=int(doc["timestamp_ms"]),
                tags=tuple(str(t) for t in doc.get("tags", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CurationError(f"malformed decision entry: {doc!r}") from exc


def now_ms() -> int:
    return time.time_ns() // 1_000_000


class DecisionLog:
    """Append-only JSON-lines log of curation decisions on disk."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load(self) -> list[CurationDecision]:
        """Replay the log; a torn trailing line (crash mid-append) is dropped."""
        if not self.path.exists():
            return []
        decisions = []
        lines = self.path.read_text().splitlines()
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                decisions.append(CurationDecision.from_json(json.loads(line)))
            except (json.JSONDecodeError, CurationError) as exc:
                if i == len(lines) - 1:
                    break
                raise CurationError(f"{self.path}:{i + 1}: corrupt decision log: {exc}") from exc
        return decisions

    def append(self, decision: CurationDecision) -> None:
        with open(self.path, "a") as f:
            f.write(json.dumps(decision.to_json(), sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())


class CurationState:
    """Effective curation state: a manifest plus the reduced decision log."""

    def __init__(self, manifest: DatasetManifest, decisions: list[CurationDecision] | None = None):
        self.manifest = manifest
        self.decisions: list[CurationDecision] = []
        self._effective: dict[tuple[str, int], CurationDecision] = {}
        for d in decisions or []:
            self._reduce(d)

    def _reduce(self, decision: CurationDecision) -> None:
        self.decisions.append(decision)
        key = (decision.record_id, decision.round)
        cur = self._effective.get(key)
        if cur is None or decision.sort_key() >= cur.sort_key():
            self._effective[key] = decision

    def effective_verdict(self, record_id: str, round: int) -> str | None:
        d = self._effective.get((record_id, round))
        return d.verdict if d else None

    def record_decision(self, decision: CurationDecision) -> str:
        """Validate and apply a decision; returns the new effective verdict.

        Re-submitting for the same (record, round) overrides via the
        latest timestamp; replaying an identical decision is a no-op.
        """
        if decision.round not in ROUNDS:
            raise CurationError(f"unknown round {decision.round}")
        if decision.verdict not in VERDICTS:
            raise CurationError(f"unknown verdict {decision.verdict!r}")
        try:
            self.manifest.record_by_id(decision.record_id)
        except KeyError as exc:
            raise CurationError(f"unknown record {decision.record_id!r}") from exc
        if decision.round == 2 and self.effective_verdict(decision.record_id, 1) != "yes":
            raise CurationError(
                f"record {decision.record_id!r} has no effective round-1 yes; round 2 not open"
            )
        self._reduce(decision)
        return self.effective_verdict(decision.record_id, decision.round)

    def queue(self, round: int) -> list[AmodalRecord]:
        """Undecided records for a round, record_id ascending.

        Round 1 queues every auto-selected record without an effective
        round-1 verdict; round 2 queues the round-1 "yes" set without an
        effective round-2 verdict.
        """
        if round not in ROUNDS:
            raise CurationError(f"unknown round {round}")
        out = []
        for rec in sorted(self.manifest.records, key=lambda r: r.record_id):
            if round == 1:
                if rec.auto_selected and self.effective_verdict(rec.record_id, 1) is None:
                    out.append(rec)
            else:
                if (
                    self.effective_verdict(rec.record_id, 1) == "yes"
                    and self.effective_verdict(rec.record_id, 2) is None
                ):
                    out.append(rec)
        return out

    def next_candidate(self, round: int, annotator_id: str = "") -> AmodalRecord | None:
        queue = self.queue(round)
        return queue[0] if queue else None

    def final_status(self, record_id: str) -> str:
        r1 = self.effective_verdict(record_id, 1)
        r2 = self.effective_verdict(record_id, 2)
        if r1 == "no" or r2 == "no":
            return "rejected"
        if r1 == "yes" and r2 == "yes":
            return "accepted"
        if r1 == "yes":
            return "round1_yes"
        return "pending"

    def progress(self) -> dict:
        rounds = {}
        for rnd in ROUNDS:
            yes = no = 0
            for rec in self.manifest.records:
                verdict = self.effective_verdict(rec.record_id, rnd)
                if verdict == "yes":
                    yes += 1
                elif verdict == "no":
                    no += 1
            rounds[str(rnd)] = {"pending": len(self.queue(rnd)), "yes": yes, "no": no}
        accepted = sum(1 for rec in self.manifest.records if self.final_status(rec.record_id) == "accepted")
        return {"rounds": rounds, "accepted": accepted}


def apply_decisions(manifest: DatasetManifest, state: CurationState) -> DatasetManifest:
    """New manifest with curation_status resolved from the effective verdicts."""
    records = [
        replace(rec, curation_status=state.final_status(rec.record_id)) for rec in manifest.records
    ]
    return replace(manifest, records=records)
