"""Set-similarity matching between estimated topics and codebook labels.

Each topic and each label is reduced to a word set; pairwise similarity
(Jaccard or unigram ROUGE F1) fills a topics-by-labels matrix, and labels
transfer under a uniqueness constraint: greedy on globally sorted scores
by default, maximum-weight bipartite matching as the alternative.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

MATRIX_FORMAT = "similarity_matrix"
MATRIX_VERSION = 1
ASSIGNMENTS_FORMAT = "assignments"
ASSIGNMENTS_VERSION = 1

MEASURES = ("jaccard", "rouge1_f1")
STRATEGIES = ("greedy_global", "optimal")


@dataclass(frozen=True)
class WordSet:
    """A topic's or label's representative stems, as an unordered set."""

    owner: str
    stems: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "stems", frozenset(self.stems))
        if not self.stems:
            raise ValueError(f"word set for {self.owner!r} is empty")

    @classmethod
    def of(cls, owner: str, words: Iterable[str]) -> "WordSet":
        return cls(owner=owner, stems=frozenset(words))


def jaccard(a: WordSet, b: WordSet) -> float:
    """|A intersect B| / |A union B|."""
    inter = len(a.stems & b.stems)
    union = len(a.stems | b.stems)
    return inter / union


def rouge1_f1(a: WordSet, b: WordSet) -> float:
    """Unigram-set F1: 2|A intersect B| / (|A| + |B|)."""
    inter = len(a.stems & b.stems)
    return 2 * inter / (len(a.stems) + len(b.stems))


_MEASURE_FNS = {"jaccard": jaccard, "rouge1_f1": rouge1_f1}


@dataclass(frozen=True)
class SimilarityMatrix:
    topic_ids: tuple[int, ...]
    labels: tuple[str, ...]
    values: np.ndarray
    measure: str

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.topic_ids), len(self.labels)):
            raise ValueError("similarity matrix shape mismatch")
        if values.size and (values.min() < 0 or values.max() > 1):
            raise ValueError("similarity values must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    def row(self, topic_id: int) -> dict[str, float]:
        i = self.topic_ids.index(topic_id)
        return {label: float(v)
                for label, v in zip(self.labels, self.values[i])}

    def to_payload(self) -> dict:
        return {
            "topic_ids": list(self.topic_ids),
            "labels": list(self.labels),
            "values": self.values.tolist(),
            "measure": self.measure,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SimilarityMatrix":
        return cls(
            topic_ids=tuple(payload["topic_ids"]),
            labels=tuple(payload["labels"]),
            values=np.asarray(payload["values"], dtype=np.float64),
            measure=payload["measure"],
        )


def similarity_matrix(topics: Sequence[WordSet], labels: Sequence[WordSet],
                      measure: str = "jaccard") -> SimilarityMatrix:
    """Pairwise similarity of every topic set against every label set."""
    if not topics or not labels:
        raise ValueError("need at least one topic set and one label set")
    fn = _MEASURE_FNS.get(measure)
    if fn is None:
        raise ValueError(f"unknown measure {measure!r}")
    values = np.array([[fn(t, l) for l in labels] for t in topics])
    return SimilarityMatrix(
        topic_ids=tuple(int(t.owner) if str(t.owner).isdigit() else i
                        for i, t in enumerate(topics)),
        labels=tuple(l.owner for l in labels),
        values=values,
        measure=measure,
    )


@dataclass(frozen=True)
class LabelAssignment:
    """One topic's transferred label; label None means UNLABELED."""

    topic_id: int
    label: str | None
    score: float | None
    rank_within_topic: int | None
    provenance: str = "auto"
    measure: str = "jaccard"
    evicted: bool = False

    def to_dict(self, similarity_row: dict[str, float] | None = None) -> dict:
        d = {
            "topic": self.topic_id,
            "label": self.label,
            "score": self.score,
            "rank_within_topic": self.rank_within_topic,
            "provenance": self.provenance,
            "measure": self.measure,
            "evicted": self.evicted,
        }
        if similarity_row is not None:
            d["similarity"] = similarity_row
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LabelAssignment":
        return cls(
            topic_id=d["topic"],
            label=d["label"],
            score=d["score"],
            rank_within_topic=d["rank_within_topic"],
            provenance=d.get("provenance", "auto"),
            measure=d.get("measure", "jaccard"),
            evicted=d.get("evicted", False),
        )


def _rank_within_topic(m: SimilarityMatrix, row: int, col: int) -> int:
    # 1-based; ties share the best rank
    score = m.values[row, col]
    return 1 + int(np.sum(m.values[row] > score))


def transfer_labels(m: SimilarityMatrix, strategy: str = "greedy_global",
                    min_score: float = 0.0) -> list[LabelAssignment]:
    """Assign each label to at most one topic.

    greedy_global: all (topic, label) cells sorted by descending score,
    ties by (topic id, label); a cell is accepted iff both sides are still
    free and its score >= min_score. optimal: maximum-weight bipartite
    matching over the cells >= min_score. Unmatched topics come back
    UNLABELED.
    """
    if not 0.0 <= min_score <= 1.0:
        raise ValueError("min_score must lie in [0, 1]")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    n_topics, n_labels = m.values.shape
    chosen: dict[int, int] = {}

    if strategy == "greedy_global":
        triples = [
            (m.values[i, j], m.topic_ids[i], m.labels[j], i, j)
            for i in range(n_topics) for j in range(n_labels)
        ]
        triples.sort(key=lambda t: (-t[0], t[1], t[2]))
        used_labels: set[int] = set()
        for score, _, _, i, j in triples:
            if i in chosen or j in used_labels or score < min_score:
                continue
            chosen[i] = j
            used_labels.add(j)
    else:
        eligible = m.values >= min_score
        padded = np.where(eligible, m.values, 0.0)
        rows, cols = linear_sum_assignment(padded, maximize=True)
        for i, j in zip(rows, cols):
            if eligible[i, j]:
                chosen[i] = j

    out = []
    for i in range(n_topics):
        if i in chosen:
            j = chosen[i]
            out.append(LabelAssignment(
                topic_id=m.topic_ids[i],
                label=m.labels[j],
                score=float(m.values[i, j]),
                rank_within_topic=_rank_within_topic(m, i, j),
                provenance="auto",
                measure=m.measure,
            ))
        else:
            out.append(LabelAssignment(
                topic_id=m.topic_ids[i], label=None, score=None,
                rank_within_topic=None, provenance="auto",
                measure=m.measure,
            ))
    return out


def unused_labels(assignments: Sequence[LabelAssignment],
                  labels: Sequence[str]) -> list[str]:
    used = {a.label for a in assignments if a.label is not None}
    return [l for l in labels if l not in used]


def apply_overrides(
    assignments: Sequence[LabelAssignment],
    overrides: Sequence[tuple[int, str | None, str]],
    matrix: SimilarityMatrix | None = None,
) -> list[LabelAssignment]:
    """Apply human override decisions on top of the auto assignment.

    Each override is (topic id, label or None for UNLABELED, annotator).
    An override may claim a label currently held elsewhere: the previous
    holder is evicted to UNLABELED and flagged. Two overrides claiming the
    same label are rejected outright.
    """
    by_topic = {a.topic_id: a for a in assignments}
    claimed: dict[str, int] = {}
    for topic_id, label, _ in overrides:
        if topic_id not in by_topic:
            raise ValueError(f"override references unknown topic {topic_id}")
        if label is not None:
            if label in claimed and claimed[label] != topic_id:
                raise ValueError(
                    f"label {label!r} claimed by two overrides: topics "
                    f"{claimed[label]} and {topic_id}")
            claimed[label] = topic_id

    result = {a.topic_id: a for a in assignments}
    for topic_id, label, _ in overrides:
        score = rank = None
        if label is not None and matrix is not None \
                and topic_id in matrix.topic_ids and label in matrix.labels:
            i = matrix.topic_ids.index(topic_id)
            j = matrix.labels.index(label)
            score = float(matrix.values[i, j])
            rank = _rank_within_topic(matrix, i, j)
        if label is not None:
            for other in list(result.values()):
                if other.topic_id != topic_id and other.label == label:
                    result[other.topic_id] = replace(
                        other, label=None, score=None,
                        rank_within_topic=None, evicted=True)
        result[topic_id] = replace(
            result[topic_id], label=label, score=score,
            rank_within_topic=rank, provenance="human_override",
            evicted=False)
    return [result[a.topic_id] for a in assignments]


def assignments_to_payload(assignments: Sequence[LabelAssignment],
                           matrix: SimilarityMatrix, strategy: str,
                           min_score: float) -> dict:
    return {
        "measure": matrix.measure,
        "strategy": strategy,
        "min_score": min_score,
        "assignments": [
            a.to_dict(similarity_row=matrix.row(a.topic_id))
            for a in assignments
        ],
        "unused_labels": unused_labels(assignments, matrix.labels),
    }
