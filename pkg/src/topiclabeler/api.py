"""Review-service HTTP API.

Serves the matched project to the browser UI: topics and their words,
current assignments with full similarity rows, codebook keyword lists, an
append-only annotation/override intake, and the live agreement report.
Writes are durable (fsync) before the 200 goes out.
"""

from __future__ import annotations

from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import topics as topics_mod
from . import validation
from .labeling import unused_labels
from .project import OverrideConflictError, ProjectState


class AnnotationIn(BaseModel):
    annotator: str
    topic_id: int
    first: str
    second: str | None = None


class OverrideIn(BaseModel):
    topic_id: int
    label: str | None = None
    annotator: str


def create_app(state: ProjectState, extra_labels: list[str] | None = None,
               ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="topiclabeler review service")

    # immutable snapshots loaded once; logs are re-read per request
    model = state.read_model()
    keyword_lists, kw_payload = state.read_keywords()
    match_cfg = state.config.get("match", {})
    cardinality = match_cfg.get("cardinality", 20)
    codebook_labels = [item["label"] for item in kw_payload["lists"]]
    codebook_labels += kw_payload.get("skipped_labels", [])
    allowed_annotation_labels = set(codebook_labels) | set(extra_labels or [])

    @app.exception_handler(RequestValidationError)
    async def _schema_violation(request: Request,
                                exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"detail": exc.errors()})

    @app.get("/api/topics")
    def get_topics():
        return {
            "slice_count": model.slice_count,
            "cardinality": cardinality,
            "topics": [
                {
                    "id": k,
                    "top_words_by_slice": [
                        topics_mod.top_words(model, k, t, cardinality)
                        for t in range(model.slice_count)
                    ],
                    "pooled_top_words": topics_mod.pooled_top_words(
                        model, k, cardinality),
                }
                for k in range(model.k)
            ],
        }

    @app.get("/api/assignments")
    def get_assignments():
        matrix = state.read_matrix()
        assignments = state.current_assignments()
        return {
            "measure": matrix.measure,
            "assignments": [
                a.to_dict(similarity_row=matrix.row(a.topic_id))
                for a in assignments
            ],
            "unused_labels": unused_labels(assignments, matrix.labels),
        }

    @app.get("/api/labels")
    def get_labels():
        return {
            "labels": [
                {
                    "label": kl.label,
                    "words": [[w, s] for w, s in kl.words],
                    "truncated": kl.truncated,
                }
                for kl in keyword_lists
            ],
            "skipped_labels": kw_payload.get("skipped_labels", []),
            "extra_labels": sorted(set(extra_labels or [])),
        }

    @app.get("/api/annotations")
    def get_annotations(annotator: str | None = None):
        """Raw annotation log (latest record per annotator+topic wins
        client-side); lets the UI rebuild per-annotator progress."""
        records = state.read_annotations()
        if annotator is not None:
            records = [r for r in records if r.annotator == annotator]
        return {"annotations": [r.to_dict() for r in records]}

    @app.post("/api/annotations")
    def post_annotation(body: AnnotationIn):
        if not 0 <= body.topic_id < model.k:
            raise HTTPException(400, f"unknown topic {body.topic_id}")
        for choice in (body.first, body.second):
            if choice is not None and choice not in allowed_annotation_labels:
                raise HTTPException(400, f"unknown label {choice!r}")
        try:
            record = validation.AnnotationRecord(
                annotator=body.annotator,
                topic_id=body.topic_id,
                first=body.first,
                second=body.second,
                timestamp=datetime.now(timezone.utc).isoformat(),
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        state.append_annotation(record)
        return {"status": "ok", "record": record.to_dict()}

    @app.post("/api/overrides")
    def post_override(body: OverrideIn):
        if not 0 <= body.topic_id < model.k:
            raise HTTPException(400, f"unknown topic {body.topic_id}")
        if not body.annotator:
            raise HTTPException(400, "annotator must be non-empty")
        try:
            state.append_override(body.topic_id, body.label, body.annotator)
        except OverrideConflictError as exc:
            raise HTTPException(409, str(exc)) from exc
        return {"status": "ok",
                "assignments": [a.to_dict()
                                for a in state.current_assignments()]}

    @app.get("/api/report")
    def get_report():
        assignments = state.current_assignments()
        annotations = state.read_annotations()
        report = validation.build_report(assignments, annotations, model,
                                         n=cardinality)
        return {
            "format": validation.REPORT_FORMAT,
            "version": validation.REPORT_VERSION,
            **report.to_payload(),
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
