"""Expert-annotation scoring: agreement proportions and Fleiss' kappa.

Annotations carry a first and optional second label choice per
(annotator, topic). Proportions compare those choices against the
automatic labels; kappa measures inter-coder agreement on first choices.
"""

from __future__ import annotations

import csv
import json
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .labeling import LabelAssignment
from .topics import TopicModel, pooled_top_words

REPORT_FORMAT = "agreement_report"
REPORT_VERSION = 1

KAPPA_METHOD_NOTE = (
    "Per-topic kappa: annotators with a first choice on every annotated "
    "topic are kept; each such annotator's choices are collapsed to "
    "'topic's modal label' vs 'other' across all annotated topics, and "
    "Fleiss' kappa is computed on that binary table. Ties in the modal "
    "label average the kappas of the tied labels. Second choices never "
    "enter kappa."
)


class DegenerateAgreementWarning(UserWarning):
    """All ratings fell in a single category; kappa defined as 1.0."""


@dataclass(frozen=True)
class AnnotationRecord:
    annotator: str
    topic_id: int
    first: str
    second: str | None = None
    timestamp: str | None = None

    def __post_init__(self):
        if not self.annotator:
            raise ValueError("annotator must be non-empty")
        if not self.first:
            raise ValueError("first choice must be non-empty")
        if self.second is not None and self.second == self.first:
            raise ValueError("first and second choices must differ")

    def to_dict(self) -> dict:
        return {
            "annotator": self.annotator,
            "topic_id": self.topic_id,
            "first": self.first,
            "second": self.second,
            "timestamp": self.timestamp,
        }


def fleiss_kappa(counts) -> float:
    """Fleiss' kappa from an items-by-categories count matrix.

    Every item must carry the same number of ratings n >= 2. Uses
    P_i = (sum_j n_ij^2 - n) / (n (n - 1)) and chance agreement
    sum_j p_j^2. When every rating lands in one category the statistic is
    degenerate (chance agreement 1); returns 1.0 with a warning.
    """
    counts = np.asarray(counts)
    if counts.ndim != 2 or counts.size == 0:
        raise ValueError("counts must be a non-empty 2-d matrix")
    if np.any(counts < 0) or not np.all(counts == counts.astype(np.int64)):
        raise ValueError("counts must be non-negative integers")
    counts = counts.astype(np.int64)
    row_sums = counts.sum(axis=1)
    n = int(row_sums[0])
    if n < 2:
        raise ValueError("every item needs at least 2 ratings")
    if np.any(row_sums != n):
        raise ValueError(
            "unequal rater counts per item; restrict to complete raters "
            f"first (saw {sorted(set(int(r) for r in row_sums))})")
    p_i = (np.sum(counts.astype(np.float64) ** 2, axis=1) - n) / (n * (n - 1))
    p_bar = float(np.mean(p_i))
    p_j = counts.sum(axis=0) / counts.sum()
    p_e = float(np.sum(p_j ** 2))
    if p_e >= 1.0:
        warnings.warn("all ratings in a single category; kappa degenerate",
                      DegenerateAgreementWarning)
        return 1.0
    return (p_bar - p_e) / (1.0 - p_e)


def _effective(annotations: Iterable[AnnotationRecord]
               ) -> dict[tuple[str, int], AnnotationRecord]:
    """Last record per (annotator, topic) wins; resubmission replaces."""
    eff: dict[tuple[str, int], AnnotationRecord] = {}
    for rec in annotations:
        eff[(rec.annotator, rec.topic_id)] = rec
    return eff


def agreement_proportions(
    annotations: Sequence[AnnotationRecord],
    assignments: Sequence[LabelAssignment],
) -> dict[int, tuple[float, float]]:
    """Per-topic share of annotators matching the auto label.

    Returns {topic_id: (prop_first, prop_second)} for topics with at least
    one annotation; unannotated topics are absent, not zero.
    """
    auto = {a.topic_id: a.label for a in assignments}
    for rec in annotations:
        if rec.topic_id not in auto:
            raise ValueError(
                f"annotation references unknown topic {rec.topic_id}")
    per_topic: dict[int, list[AnnotationRecord]] = defaultdict(list)
    for rec in _effective(annotations).values():
        per_topic[rec.topic_id].append(rec)
    out = {}
    for topic_id, recs in per_topic.items():
        label = auto[topic_id]
        n = len(recs)
        first = sum(1 for r in recs if label is not None and r.first == label)
        second = sum(1 for r in recs
                     if label is not None and r.second == label)
        out[topic_id] = (first / n, second / n)
    return out


def _complete_annotators(eff: dict[tuple[str, int], AnnotationRecord],
                         topics: list[int]) -> list[str]:
    annotators = sorted({a for a, _ in eff})
    return [a for a in annotators if all((a, t) in eff for t in topics)]


def per_topic_kappa(annotations: Sequence[AnnotationRecord]
                    ) -> dict[int, float | None]:
    """Binary-collapse kappa per topic over annotators' first choices.

    Only annotators covering every annotated topic enter the table (equal
    rater counts are required); topics need n >= 2 such raters, else None.
    Tied modal labels average their per-label kappas.
    """
    eff = _effective(annotations)
    topics = sorted({t for _, t in eff})
    if not topics:
        return {}
    complete = _complete_annotators(eff, topics)
    out: dict[int, float | None] = {}
    for topic_id in topics:
        firsts_all = [r.first for r in eff.values()
                      if r.topic_id == topic_id]
        tally = Counter(firsts_all)
        top_count = max(tally.values())
        modal_labels = sorted(l for l, c in tally.items()
                              if c == top_count)
        if len(complete) < 2:
            out[topic_id] = None
            continue
        kappas = []
        for label in modal_labels:
            table = []
            for t in topics:
                hits = sum(1 for a in complete
                           if eff[(a, t)].first == label)
                table.append([hits, len(complete) - hits])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateAgreementWarning)
                kappas.append(fleiss_kappa(np.array(table)))
        out[topic_id] = float(np.mean(kappas))
    return out


def modal_labels(annotations: Sequence[AnnotationRecord]
                 ) -> dict[int, list[str]]:
    """Most frequent first choice per topic; ties return the tied set."""
    eff = _effective(annotations)
    per_topic: dict[int, Counter] = defaultdict(Counter)
    for rec in eff.values():
        per_topic[rec.topic_id][rec.first] += 1
    out = {}
    for topic_id, tally in per_topic.items():
        top = max(tally.values())
        out[topic_id] = sorted(l for l, c in tally.items() if c == top)
    return out


@dataclass(frozen=True)
class ReportRow:
    topic_id: int
    auto_label: str | None
    auto_score: float | None
    provenance: str
    top_words: tuple[str, ...]
    expert_labels: tuple[str, ...] | None = None
    prop_first: float | None = None
    prop_second: float | None = None
    kappa: float | None = None


@dataclass(frozen=True)
class AgreementReport:
    rows: tuple[ReportRow, ...]
    cardinality: int
    has_annotations: bool

    def summary(self) -> dict:
        labeled = [r for r in self.rows if r.auto_label is not None]
        kappas = [r.kappa for r in self.rows if r.kappa is not None]
        return {
            "topics": len(self.rows),
            "labeled": len(labeled),
            "unlabeled": len(self.rows) - len(labeled),
            "annotated": sum(1 for r in self.rows
                             if r.expert_labels is not None),
            "mean_kappa": (float(np.mean(kappas)) if kappas else None),
        }

    def to_payload(self) -> dict:
        return {
            "cardinality": self.cardinality,
            "has_annotations": self.has_annotations,
            "rows": [
                {
                    "topic": r.topic_id,
                    "auto_label": r.auto_label,
                    "auto_score": r.auto_score,
                    "provenance": r.provenance,
                    "top_words": list(r.top_words),
                    "expert_labels": (list(r.expert_labels)
                                      if r.expert_labels is not None
                                      else None),
                    "prop_first": r.prop_first,
                    "prop_second": r.prop_second,
                    "fleiss_kappa": r.kappa,
                }
                for r in self.rows
            ],
            "summary": self.summary(),
            "method_notes": KAPPA_METHOD_NOTE,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "AgreementReport":
        rows = tuple(
            ReportRow(
                topic_id=r["topic"],
                auto_label=r["auto_label"],
                auto_score=r["auto_score"],
                provenance=r.get("provenance", "auto"),
                top_words=tuple(r["top_words"]),
                expert_labels=(tuple(r["expert_labels"])
                               if r["expert_labels"] is not None else None),
                prop_first=r["prop_first"],
                prop_second=r["prop_second"],
                kappa=r["fleiss_kappa"],
            )
            for r in payload["rows"]
        )
        return cls(rows=rows, cardinality=payload["cardinality"],
                   has_annotations=payload["has_annotations"])


CSV_COLUMNS = (
    "topic", "auto_label", "auto_score", "provenance", "expert_labels",
    "prop_first", "prop_second", "fleiss_kappa", "top_words",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_csv(report: AgreementReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in report.rows:
            writer.writerow([
                r.topic_id,
                _csv_cell(r.auto_label),
                _csv_cell(r.auto_score),
                r.provenance,
                "|".join(r.expert_labels) if r.expert_labels else "",
                _csv_cell(r.prop_first),
                _csv_cell(r.prop_second),
                _csv_cell(r.kappa),
                " ".join(r.top_words),
            ])


def report_from_csv(path: str | Path, cardinality: int) -> AgreementReport:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected report header: {header}")
        has_annotations = False
        for rec in reader:
            cells = dict(zip(CSV_COLUMNS, rec))
            expert = (tuple(cells["expert_labels"].split("|"))
                      if cells["expert_labels"] else None)
            if expert is not None:
                has_annotations = True
            rows.append(ReportRow(
                topic_id=int(cells["topic"]),
                auto_label=cells["auto_label"] or None,
                auto_score=(float(cells["auto_score"])
                            if cells["auto_score"] else None),
                provenance=cells["provenance"],
                top_words=tuple(cells["top_words"].split()),
                expert_labels=expert,
                prop_first=(float(cells["prop_first"])
                            if cells["prop_first"] else None),
                prop_second=(float(cells["prop_second"])
                             if cells["prop_second"] else None),
                kappa=(float(cells["fleiss_kappa"])
                       if cells["fleiss_kappa"] else None),
            ))
    return AgreementReport(rows=tuple(rows), cardinality=cardinality,
                           has_annotations=has_annotations)


def build_report(
    assignments: Sequence[LabelAssignment],
    annotations: Sequence[AnnotationRecord],
    model: TopicModel,
    n: int = 20,
) -> AgreementReport:
    """One row per topic: auto label and score, expert columns when
    annotations exist, and the pooled top-n words."""
    props = agreement_proportions(annotations, assignments) \
        if annotations else {}
    kappas = per_topic_kappa(annotations) if annotations else {}
    modal = modal_labels(annotations) if annotations else {}
    rows = []
    for a in sorted(assignments, key=lambda x: x.topic_id):
        prop = props.get(a.topic_id)
        rows.append(ReportRow(
            topic_id=a.topic_id,
            auto_label=a.label,
            auto_score=a.score,
            provenance=a.provenance,
            top_words=tuple(pooled_top_words(model, a.topic_id, n)),
            expert_labels=(tuple(modal[a.topic_id])
                           if a.topic_id in modal else None),
            prop_first=prop[0] if prop else None,
            prop_second=prop[1] if prop else None,
            kappa=kappas.get(a.topic_id),
        ))
    return AgreementReport(rows=tuple(rows), cardinality=n,
                           has_annotations=bool(annotations))


def parse_annotations(path: str | Path,
                      allowed_labels: set[str] | None = None
                      ) -> list[AnnotationRecord]:
    """Import annotations from CSV (annotator,topic_id,first,second) or
    JSONL records with the same fields."""
    path = Path(path)
    records = []
    if path.suffix.lower() == ".csv":
        with open(path, encoding="utf-8", newline="") as fh:
            for i, row in enumerate(csv.DictReader(fh), start=2):
                records.append(_record_from_mapping(row, f"line {i}"))
    else:
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(
                        f"line {i}: malformed JSON ({exc.msg})") from exc
                records.append(_record_from_mapping(obj, f"line {i}"))
    if allowed_labels is not None:
        for rec in records:
            for choice in (rec.first, rec.second):
                if choice is not None and choice not in allowed_labels:
                    raise ValueError(
                        f"annotation for topic {rec.topic_id} uses unknown "
                        f"label {choice!r}")
    return records


def _record_from_mapping(obj: dict, where: str) -> AnnotationRecord:
    try:
        second = obj.get("second") or None
        return AnnotationRecord(
            annotator=str(obj["annotator"]),
            topic_id=int(obj["topic_id"]),
            first=str(obj["first"]),
            second=str(second) if second else None,
            timestamp=obj.get("timestamp"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{where}: invalid annotation record "
                         f"({exc})") from exc
