"""Ground-truth data model: quality ladders, satisfaction records, ratio curves.

A ladder is one original image plus its ordered compressed versions (rungs).
Satisfaction records are binary per-subject verdicts on single rungs; the
satisfied-user / satisfied-machine ratio of a rung is the fraction of a
complete subject panel that is satisfied with it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError


class SubjectKind(str, enum.Enum):
    HUMAN = "human"
    MACHINE = "machine"


class RatioKind(str, enum.Enum):
    SUR = "SUR"
    SMR = "SMR"

    @property
    def subject_kind(self) -> SubjectKind:
        return SubjectKind.HUMAN if self is RatioKind.SUR else SubjectKind.MACHINE


@dataclass(frozen=True)
class Rung:
    rung_index: int
    q_param: int
    image_ref: str


@dataclass(frozen=True)
class QualityLadder:
    """One original image and its K compressed rungs, ordered by compression.

    Rung indices must be 1..K without gaps and q_param must strictly increase
    with the index (quality degrades as the index grows).
    """

    ladder_id: str
    original_ref: str
    rungs: tuple[Rung, ...]
    codec_tag: str = ""

    def __post_init__(self):
        if not self.ladder_id:
            raise ValidationError("ladder_id must be non-empty")
        if len(self.rungs) < 1:
            raise ValidationError(f"ladder {self.ladder_id!r}: needs at least one rung")
        indices = [r.rung_index for r in self.rungs]
        if indices != list(range(1, len(self.rungs) + 1)):
            raise ValidationError(
                f"ladder {self.ladder_id!r}: rung indices must be 1..K without gaps, got {indices}"
            )
        q = [r.q_param for r in self.rungs]
        if any(b <= a for a, b in zip(q, q[1:])):
            raise ValidationError(
                f"ladder {self.ladder_id!r}: q_param must strictly increase with rung_index, got {q}"
            )
        for r in self.rungs:
            if r.image_ref == self.original_ref:
                raise ValidationError(
                    f"ladder {self.ladder_id!r}: rung {r.rung_index} reuses the original image ref"
                )

    @property
    def k(self) -> int:
        return len(self.rungs)

    @property
    def rung_indices(self) -> tuple[int, ...]:
        return tuple(r.rung_index for r in self.rungs)


@dataclass(frozen=True)
class SatisfactionRecord:
    """One subject's binary verdict on one rung."""

    ladder_id: str
    rung_index: int
    subject_id: str
    subject_kind: SubjectKind
    satisfied: bool


@dataclass(frozen=True)
class RatioCurve:
    """Per-rung satisfaction ratios for one ladder and one population kind.

    Counts are kept exact; `values` materializes the real-valued ratios on
    demand so equality checks can stay rational.
    """

    ladder_id: str
    kind: RatioKind
    satisfied_counts: tuple[int, ...]
    rung_indices: tuple[int, ...]
    population_size: int

    @property
    def values(self) -> tuple[tuple[int, float], ...]:
        return tuple(
            (idx, count / self.population_size)
            for idx, count in zip(self.rung_indices, self.satisfied_counts)
        )

    def ratio_at(self, rung_index: int) -> float:
        pos = self.rung_indices.index(rung_index)
        return self.satisfied_counts[pos] / self.population_size


def satisfaction_ratio(records: list[SatisfactionRecord]) -> float:
    """Fraction of subjects satisfied with one rung.

    All records must belong to the same (ladder, rung) and share one subject
    kind; the ratio is |satisfied| / |records|.
    """
    if not records:
        raise ValidationError("empty population")
    kinds = {r.subject_kind for r in records}
    if len(kinds) > 1:
        raise ValidationError("mixed population")
    keys = {(r.ladder_id, r.rung_index) for r in records}
    if len(keys) > 1:
        raise ValidationError(f"records span multiple rungs: {sorted(keys)}")
    subjects = [r.subject_id for r in records]
    if len(set(subjects)) != len(subjects):
        raise ValidationError("duplicate subject in population")
    return sum(1 for r in records if r.satisfied) / len(records)


def ratio_curve(
    ladder: QualityLadder,
    records: list[SatisfactionRecord],
    kind: RatioKind,
) -> RatioCurve:
    """Aggregate a complete subject panel into one per-rung ratio curve.

    Every subject must have judged every rung of the ladder; partial panels
    are rejected ("ragged population") rather than imputed so ratios stay
    comparable across rungs.
    """
    expected_kind = kind.subject_kind
    for r in records:
        if r.subject_kind is not expected_kind:
            raise ValidationError("mixed population")
        if r.ladder_id != ladder.ladder_id:
            raise ValidationError(
                f"record for ladder {r.ladder_id!r} passed to curve of {ladder.ladder_id!r}"
            )
        if r.rung_index not in ladder.rung_indices:
            raise ValidationError(
                f"ladder {ladder.ladder_id!r}: record names unknown rung {r.rung_index}"
            )

    by_rung: dict[int, list[SatisfactionRecord]] = {idx: [] for idx in ladder.rung_indices}
    for r in records:
        by_rung[r.rung_index].append(r)

    for idx in ladder.rung_indices:
        if not by_rung[idx]:
            raise ValidationError(
                f"ladder {ladder.ladder_id!r}: no {kind.value} records for rung {idx}"
            )

    panels = {idx: frozenset(r.subject_id for r in rs) for idx, rs in by_rung.items()}
    reference_panel = panels[ladder.rung_indices[0]]
    if any(panel != reference_panel for panel in panels.values()):
        raise ValidationError("ragged population: every subject must judge every rung")

    seen: set[tuple[int, str]] = set()
    for r in records:
        key = (r.rung_index, r.subject_id)
        if key in seen:
            raise ValidationError(
                f"duplicate entry: subject {r.subject_id!r} rated rung {r.rung_index} twice"
            )
        seen.add(key)

    counts = tuple(
        sum(1 for r in by_rung[idx] if r.satisfied) for idx in ladder.rung_indices
    )
    return RatioCurve(
        ladder_id=ladder.ladder_id,
        kind=kind,
        satisfied_counts=counts,
        rung_indices=ladder.rung_indices,
        population_size=len(reference_panel),
    )


def simulate_machine_population(
    ladder: QualityLadder,
    thresholds: list[int],
    seed: int,
    flip_rate: float = 0.0,
) -> list[SatisfactionRecord]:
    """Emit a deterministic synthetic machine panel for one ladder.

    Machine m is satisfied at rung k iff k <= thresholds[m]; seeded random
    flips at `flip_rate` then perturb individual verdicts, producing the
    non-monotone curves real machine populations show.
    """
    k = ladder.k
    for i, t in enumerate(thresholds):
        if not (0 <= t <= k):
            raise ValidationError(
                f"threshold {t} for machine {i} outside [0, {k}]"
            )
    if not (0.0 <= flip_rate <= 1.0):
        raise ValidationError(f"flip_rate {flip_rate} outside [0, 1]")

    rng = np.random.default_rng(seed)
    records = []
    for m, threshold in enumerate(thresholds):
        subject_id = f"machine_{m:03d}"
        for idx in ladder.rung_indices:
            satisfied = idx <= threshold
            if flip_rate > 0.0 and rng.random() < flip_rate:
                satisfied = not satisfied
            records.append(
                SatisfactionRecord(
                    ladder_id=ladder.ladder_id,
                    rung_index=idx,
                    subject_id=subject_id,
                    subject_kind=SubjectKind.MACHINE,
                    satisfied=satisfied,
                )
            )
    return records


def as_human_records(records: list[SatisfactionRecord]) -> list[SatisfactionRecord]:
    """Relabel a record set as a human panel (synthetic-fixture helper)."""
    return [
        replace(r, subject_kind=SubjectKind.HUMAN, subject_id=f"human_{r.subject_id}")
        for r in records
    ]
