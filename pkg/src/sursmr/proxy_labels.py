"""Proxy satisfied-user labels from an ensemble of full-reference IQA scorers.

Each scorer's raw scores are brought to higher-is-better polarity, min-max
normalized over the ladder's rung set, and averaged across the ensemble to
yield a per-rung label in [0, 1].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .ladders import QualityLadder

#: A per-scorer score range below this is treated as degenerate: the scorer
#: perceives no quality change over the ladder and contributes 1.0 everywhere.
DEFAULT_DEGENERATE_EPS = 1e-9


class Polarity(str, enum.Enum):
    HIGHER_BETTER = "higher_better"
    LOWER_BETTER = "lower_better"


class ScorerOrigin(str, enum.Enum):
    BUILTIN = "builtin"
    EXTERNAL = "external"


@dataclass(frozen=True)
class ScorerDescriptor:
    scorer_id: str
    polarity: Polarity
    origin: ScorerOrigin = ScorerOrigin.EXTERNAL


@dataclass
class ScoreTable:
    """Raw quality scores keyed by (ladder_id, rung_index, scorer_id).

    For every (ladder, scorer) pair present, all rungs of that ladder must be
    covered: normalization needs the full ladder.
    """

    entries: dict[tuple[str, int, str], float] = field(default_factory=dict)

    def add(self, ladder_id: str, rung_index: int, scorer_id: str, score: float) -> None:
        key = (ladder_id, rung_index, scorer_id)
        if key in self.entries:
            raise ValidationError(f"duplicate entry: {key}")
        self.entries[key] = score

    def score(self, ladder_id: str, rung_index: int, scorer_id: str) -> float:
        key = (ladder_id, rung_index, scorer_id)
        if key not in self.entries:
            raise ValidationError(
                f"missing score for ladder {ladder_id!r}, rung {rung_index}, "
                f"scorer {scorer_id!r}"
            )
        return self.entries[key]

    def ladder_ids(self) -> list[str]:
        return sorted({k[0] for k in self.entries})

    def scorer_ids(self, ladder_id: str | None = None) -> list[str]:
        keys = self.entries.keys()
        if ladder_id is not None:
            keys = [k for k in keys if k[0] == ladder_id]
        return sorted({k[2] for k in keys})

    def rung_indices(self, ladder_id: str, scorer_id: str) -> list[int]:
        return sorted(
            k[1] for k in self.entries if k[0] == ladder_id and k[2] == scorer_id
        )

    def validate_rectangular(self) -> None:
        """Require every scorer of a ladder to cover the same rung set."""
        for ladder_id in self.ladder_ids():
            scorers = self.scorer_ids(ladder_id)
            rung_sets = {s: tuple(self.rung_indices(ladder_id, s)) for s in scorers}
            all_rungs = tuple(sorted({i for rs in rung_sets.values() for i in rs}))
            for scorer_id, rs in rung_sets.items():
                if rs != all_rungs:
                    missing = sorted(set(all_rungs) - set(rs))
                    raise ValidationError(
                        f"incomplete ladder coverage: ladder {ladder_id!r}, "
                        f"scorer {scorer_id!r} missing rungs {missing}"
                    )


@dataclass(frozen=True)
class ProxyLabelSet:
    """Per-rung proxy labels for a set of ladders, all in [0, 1]."""

    labels: dict[tuple[str, int], float]
    scorer_ids: tuple[str, ...]

    def label(self, ladder_id: str, rung_index: int) -> float:
        return self.labels[(ladder_id, rung_index)]


def canonicalize_polarity(scores: list[float], polarity: Polarity) -> list[float]:
    """Bring one scorer's ladder scores to higher-is-better orientation."""
    if polarity is Polarity.LOWER_BETTER:
        return [1.0 - s for s in scores]
    return list(scores)


def normalize_over_ladder(
    scores: list[float], degenerate_eps: float = DEFAULT_DEGENERATE_EPS
) -> list[float]:
    """Min-max normalize one scorer's scores over a full ladder.

    A degenerate ladder (score range below `degenerate_eps`) maps to all 1.0:
    the scorer perceives no degradation anywhere, which in satisfaction terms
    means satisfied at every rung.
    """
    if not scores:
        raise ValidationError("cannot normalize an empty score list")
    lo = min(scores)
    hi = max(scores)
    if hi - lo < degenerate_eps:
        return [1.0] * len(scores)
    return [(s - lo) / (hi - lo) for s in scores]


def proxy_sur(
    table: ScoreTable,
    scorers: list[ScorerDescriptor],
    ladder: QualityLadder,
    degenerate_eps: float = DEFAULT_DEGENERATE_EPS,
) -> ProxyLabelSet:
    """Ensemble-average normalized scores into per-rung proxy labels.

    label(rung) = mean over scorers of the polarity-canonicalized, ladder-
    normalized score at that rung.
    """
    if not scorers:
        raise ValidationError("proxy labels need at least one scorer")
    ids = [s.scorer_id for s in scorers]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"duplicate scorer ids: {ids}")

    per_scorer: list[list[float]] = []
    for scorer in scorers:
        raw = [
            table.score(ladder.ladder_id, idx, scorer.scorer_id)
            for idx in ladder.rung_indices
        ]
        canon = canonicalize_polarity(raw, scorer.polarity)
        per_scorer.append(normalize_over_ladder(canon, degenerate_eps))

    labels = {}
    for pos, idx in enumerate(ladder.rung_indices):
        labels[(ladder.ladder_id, idx)] = math.fsum(
            norm[pos] for norm in per_scorer
        ) / len(scorers)
    return ProxyLabelSet(labels=labels, scorer_ids=tuple(ids))


def proxy_sur_many(
    table: ScoreTable,
    scorers: list[ScorerDescriptor],
    ladders: list[QualityLadder],
    degenerate_eps: float = DEFAULT_DEGENERATE_EPS,
) -> ProxyLabelSet:
    """proxy_sur over multiple ladders, merged into one label set."""
    merged: dict[tuple[str, int], float] = {}
    for ladder in ladders:
        part = proxy_sur(table, scorers, ladder, degenerate_eps)
        merged.update(part.labels)
    return ProxyLabelSet(labels=merged, scorer_ids=tuple(s.scorer_id for s in scorers))


def monotonicity_report(
    table: ScoreTable, scorers: list[ScorerDescriptor], ladder: QualityLadder
) -> dict[str, int]:
    """Count per-scorer monotonicity violations over one ladder.

    A violation is a rung pair (k, k+1) where the canonicalized score rises
    although compression got heavier. Scorers are never down-weighted for
    this; the report only surfaces the inconsistency.
    """
    report = {}
    for scorer in scorers:
        raw = [
            table.score(ladder.ladder_id, idx, scorer.scorer_id)
            for idx in ladder.rung_indices
        ]
        canon = canonicalize_polarity(raw, scorer.polarity)
        report[scorer.scorer_id] = sum(
            1 for a, b in zip(canon, canon[1:]) if b > a
        )
    return report
