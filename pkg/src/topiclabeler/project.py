"""File-backed project state for the pipeline and the review service.

One directory holds every artifact as versioned JSON plus two append-only
JSONL logs (annotations, overrides). Stages move forward only:
ingested -> fitted -> matched -> reviewed.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Sequence

from .codebook import (KEYWORDS_FORMAT, KEYWORDS_VERSION, KeywordList,
                       keyword_lists_from_payload)
from .corpus import (CORPUS_FORMAT, CORPUS_VERSION, DOCUMENTS_FORMAT,
                     DOCUMENTS_VERSION, Corpus, Document)
from .labeling import (ASSIGNMENTS_FORMAT, ASSIGNMENTS_VERSION,
                       MATRIX_FORMAT, MATRIX_VERSION, LabelAssignment,
                       SimilarityMatrix, apply_overrides)
from .serialize import ArtifactError, read_artifact, write_artifact
from .topics import MODEL_FORMAT, MODEL_VERSION, TopicModel
from .validation import AnnotationRecord

PROJECT_FORMAT = "project"
PROJECT_VERSION = 1

STAGES = ("new", "ingested", "fitted", "matched", "reviewed")

ARTIFACTS = {
    "documents": "documents.json",
    "corpus": "corpus.json",
    "model": "model.json",
    "keywords": "keywords.json",
    "matrix": "matrix.json",
    "assignments": "assignments.json",
    "selectk": "selectk.json",
}
ANNOTATIONS_LOG = "annotations.jsonl"
OVERRIDES_LOG = "overrides.jsonl"


class PipelineStateError(ValueError):
    """A step was run before its prerequisite artifact exists."""


class OverrideConflictError(ValueError):
    """Two pending overrides claim the same label."""


def _append_durable(path: Path, record: dict) -> None:
    line = json.dumps(record, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


def _read_log(path: Path) -> list[dict]:
    if not path.exists():
        return []
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out


class ProjectState:
    """Single-project persistence; all writes go through one lock."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    # -- project header ------------------------------------------------

    def _header_path(self) -> Path:
        return self.root / "project.json"

    def _read_header(self) -> dict:
        if not self._header_path().exists():
            return {"stage": "new", "config": {}}
        doc = read_artifact(self._header_path(), PROJECT_FORMAT,
                            PROJECT_VERSION)
        return {"stage": doc["stage"], "config": doc.get("config", {})}

    @property
    def stage(self) -> str:
        return self._read_header()["stage"]

    @property
    def config(self) -> dict:
        return self._read_header()["config"]

    def advance(self, stage: str, config: dict | None = None) -> None:
        """Move the project stage forward; never backward."""
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        header = self._read_header()
        current = header["stage"]
        new_stage = max((current, stage), key=STAGES.index)
        if config is not None:
            header["config"].update(config)
        self.root.mkdir(parents=True, exist_ok=True)
        write_artifact(self._header_path(), PROJECT_FORMAT, PROJECT_VERSION,
                       {"stage": new_stage, "config": header["config"]})

    def require_stage(self, stage: str, hint: str) -> None:
        if STAGES.index(self.stage) < STAGES.index(stage):
            raise PipelineStateError(hint)

    # -- artifacts -----------------------------------------------------

    def path(self, name: str) -> Path:
        return self.root / ARTIFACTS[name]

    def write_documents(self, docs: Sequence[Document]) -> None:
        payload = {"documents": [
            {"id": d.id, "author": d.author, "slice": d.slice,
             "text": d.text, "procedural": d.procedural_flag}
            for d in docs
        ]}
        self.root.mkdir(parents=True, exist_ok=True)
        write_artifact(self.path("documents"), DOCUMENTS_FORMAT,
                       DOCUMENTS_VERSION, payload)

    def read_documents(self) -> list[Document]:
        try:
            doc = read_artifact(self.path("documents"), DOCUMENTS_FORMAT,
                                DOCUMENTS_VERSION)
        except ArtifactError as exc:
            raise PipelineStateError(
                "requires ingested documents; run `ingest` first") from exc
        return [
            Document(id=d["id"], author=d["author"], slice=d["slice"],
                     text=d["text"],
                     procedural_flag=d.get("procedural", False))
            for d in doc["documents"]
        ]

    def write_corpus(self, corpus: Corpus) -> None:
        write_artifact(self.path("corpus"), CORPUS_FORMAT, CORPUS_VERSION,
                       corpus.to_payload())

    def read_corpus(self) -> Corpus:
        try:
            doc = read_artifact(self.path("corpus"), CORPUS_FORMAT,
                                CORPUS_VERSION)
        except ArtifactError as exc:
            raise PipelineStateError(
                "requires a preprocessed corpus; run `preprocess` "
                "first") from exc
        return Corpus.from_payload(doc)

    def write_model(self, model: TopicModel) -> None:
        write_artifact(self.path("model"), MODEL_FORMAT, MODEL_VERSION,
                       model.to_payload())

    def read_model(self) -> TopicModel:
        try:
            doc = read_artifact(self.path("model"), MODEL_FORMAT,
                                MODEL_VERSION)
        except ArtifactError as exc:
            raise PipelineStateError(
                "requires fitted model; run `fit` first") from exc
        return TopicModel.from_payload(doc)

    def write_keywords(self, payload: dict) -> None:
        write_artifact(self.path("keywords"), KEYWORDS_FORMAT,
                       KEYWORDS_VERSION, payload)

    def read_keywords(self) -> tuple[list[KeywordList], dict]:
        try:
            doc = read_artifact(self.path("keywords"), KEYWORDS_FORMAT,
                                KEYWORDS_VERSION)
        except ArtifactError as exc:
            raise PipelineStateError(
                "requires codebook keywords; run `keywords` first") from exc
        return keyword_lists_from_payload(doc), doc

    def write_matrix(self, matrix: SimilarityMatrix) -> None:
        write_artifact(self.path("matrix"), MATRIX_FORMAT, MATRIX_VERSION,
                       matrix.to_payload())

    def read_matrix(self) -> SimilarityMatrix:
        try:
            doc = read_artifact(self.path("matrix"), MATRIX_FORMAT,
                                MATRIX_VERSION)
        except ArtifactError as exc:
            raise PipelineStateError(
                "requires a similarity matrix; run `match` first") from exc
        return SimilarityMatrix.from_payload(doc)

    def write_assignments(self, payload: dict) -> None:
        write_artifact(self.path("assignments"), ASSIGNMENTS_FORMAT,
                       ASSIGNMENTS_VERSION, payload)

    def read_assignments_payload(self) -> dict:
        try:
            return read_artifact(self.path("assignments"),
                                 ASSIGNMENTS_FORMAT, ASSIGNMENTS_VERSION)
        except ArtifactError as exc:
            raise PipelineStateError(
                "requires label assignments; run `match` first") from exc

    def read_auto_assignments(self) -> list[LabelAssignment]:
        payload = self.read_assignments_payload()
        return [LabelAssignment.from_dict(d)
                for d in payload["assignments"]]

    # -- logs ----------------------------------------------------------

    def append_annotation(self, record: AnnotationRecord) -> None:
        with self._lock:
            _append_durable(self.root / ANNOTATIONS_LOG, record.to_dict())
            self.advance("reviewed")

    def read_annotations(self) -> list[AnnotationRecord]:
        return [
            AnnotationRecord(
                annotator=d["annotator"], topic_id=d["topic_id"],
                first=d["first"], second=d.get("second"),
                timestamp=d.get("timestamp"))
            for d in _read_log(self.root / ANNOTATIONS_LOG)
        ]

    def append_override(self, topic_id: int, label: str | None,
                        annotator: str) -> None:
        """Validate against the compacted override log, then append.

        The log keeps one effective override per topic (latest wins);
        a new override whose label is already claimed by a different
        topic's effective override is rejected.
        """
        with self._lock:
            pending = self.effective_overrides()
            pending[topic_id] = (topic_id, label, annotator)
            claims: dict[str, int] = {}
            for t, lab, _ in pending.values():
                if lab is None:
                    continue
                if lab in claims and claims[lab] != t:
                    raise OverrideConflictError(
                        f"label {lab!r} already claimed by topic "
                        f"{claims[lab]}")
                claims[lab] = t
            _append_durable(self.root / OVERRIDES_LOG, {
                "topic_id": topic_id, "label": label,
                "annotator": annotator,
            })
            self.advance("reviewed")

    def effective_overrides(self) -> dict[int, tuple[int, str | None, str]]:
        eff: dict[int, tuple[int, str | None, str]] = {}
        for d in _read_log(self.root / OVERRIDES_LOG):
            eff[d["topic_id"]] = (d["topic_id"], d["label"], d["annotator"])
        return eff

    def current_assignments(self) -> list[LabelAssignment]:
        """Auto assignments with the effective override log applied."""
        auto = self.read_auto_assignments()
        overrides = list(self.effective_overrides().values())
        if not overrides:
            return auto
        matrix = self.read_matrix()
        return apply_overrides(auto, overrides, matrix=matrix)
