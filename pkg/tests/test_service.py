import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from topiclabeler.api import create_app
from topiclabeler.cli import main
from topiclabeler.project import ProjectState
from topiclabeler.synthetic import planted_codebook, planted_corpus

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "demo"

ARTIFACT_FILES = ("documents.json", "corpus.json", "model.json",
                  "keywords.json", "matrix.json", "assignments.json",
                  "project.json")


def write_inputs(dirpath, n_topics=4, docs_per_slice=60, seed=3):
    docs, vocabs = planted_corpus(
        n_topics=n_topics, words_per_topic=20, n_slices=2,
        docs_per_slice=docs_per_slice, tokens_per_doc=30, seed=seed)
    speeches = dirpath / "speeches.jsonl"
    with open(speeches, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "author": d.author,
                                 "slice": d.slice, "text": d.text}) + "\n")
    codebook, labels = planted_codebook(vocabs, n_decoys=1, seed=seed)
    cb_path = dirpath / "codebook.json"
    cb_path.write_text(json.dumps(codebook), encoding="utf-8")
    config = {
        "preprocess": {"min_term_count": 5, "min_doc_freq": 2},
        "fit": {"k": n_topics, "iterations": 120, "burn_in": 20, "seed": 5},
        "match": {"cardinality": 15},
        "extra_labels": ["Somewhere Else"],
    }
    cfg_path = dirpath / "config.json"
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    return speeches, cb_path, cfg_path, labels


def run_pipeline(project, speeches, cb_path, cfg_path):
    for argv in (
        ["--config", str(cfg_path), "ingest", "--project", str(project),
         "--input", str(speeches)],
        ["--config", str(cfg_path), "preprocess", "--project",
         str(project)],
        ["--config", str(cfg_path), "fit", "--project", str(project)],
        ["--config", str(cfg_path), "keywords", "--project", str(project),
         "--codebook", str(cb_path)],
        ["--config", str(cfg_path), "match", "--project", str(project)],
    ):
        assert main(argv) == 0


@pytest.fixture(scope="module")
def matched_project(tmp_path_factory):
    base = tmp_path_factory.mktemp("proj")
    speeches, cb_path, cfg_path, labels = write_inputs(base)
    project = base / "state"
    run_pipeline(project, speeches, cb_path, cfg_path)
    return project, cfg_path, labels


@pytest.fixture()
def client(matched_project, tmp_path):
    # copy project so write tests never leak between cases
    import shutil
    project, cfg_path, labels = matched_project
    work = tmp_path / "proj"
    shutil.copytree(project, work)
    state = ProjectState(work)
    app = create_app(state, extra_labels=["Somewhere Else"])
    return TestClient(app), state, labels


class TestCliPipeline:
    def test_match_before_fit_exits_2(self, tmp_path, capsys):
        base = tmp_path
        speeches, cb_path, cfg_path, _ = write_inputs(base, docs_per_slice=20)
        project = base / "p"
        assert main(["ingest", "--project", str(project), "--input",
                     str(speeches)]) == 0
        assert main(["--config", str(cfg_path), "keywords", "--project",
                     str(project), "--codebook", str(cb_path)]) == 0
        code = main(["--config", str(cfg_path), "match", "--project",
                     str(project)])
        assert code == 2
        assert "requires fitted model" in capsys.readouterr().err

    def test_report_before_match_exits_2(self, tmp_path, capsys):
        code = main(["report", "--project", str(tmp_path / "empty")])
        assert code == 2
        assert "match" in capsys.readouterr().err

    def test_demo_pipeline_labels_every_topic(self, tmp_path):
        project = tmp_path / "demo-state"
        cfg = str(DEMO / "config.json")
        for argv in (
            ["--config", cfg, "ingest", "--project", str(project),
             "--input", str(DEMO / "speeches.jsonl")],
            ["--config", cfg, "preprocess", "--project", str(project)],
            ["--config", cfg, "fit", "--project", str(project)],
            ["--config", cfg, "keywords", "--project", str(project),
             "--codebook", str(DEMO / "codebook.json")],
            ["--config", cfg, "match", "--project", str(project)],
        ):
            assert main(argv) == 0
        payload = json.loads((project / "assignments.json").read_text())
        assert len(payload["assignments"]) == 8
        assert all(a["label"] for a in payload["assignments"])
        assert payload["unused_labels"] == []

    def test_report_csv_shape(self, matched_project, tmp_path):
        project, cfg_path, _ = matched_project
        out = tmp_path / "report.csv"
        assert main(["report", "--project", str(project), "--format",
                     "csv", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("topic,auto_label,auto_score")
        assert len(lines) == 1 + 4

    def test_select_k_writes_table(self, matched_project, capsys):
        project, cfg_path, _ = matched_project
        assert main(["--config", str(cfg_path), "select-k", "--project",
                     str(project), "--k-values", "2,4",
                     "--iterations", "40"]) == 0
        out = capsys.readouterr().out
        assert "mean_coherence" in out
        payload = json.loads((project / "selectk.json").read_text())
        assert [r["k"] for r in payload["rows"]] == [2, 4]

    def test_validate_imports_and_prints(self, matched_project, tmp_path,
                                         capsys):
        import shutil
        project, cfg_path, labels = matched_project
        work = tmp_path / "proj"
        shutil.copytree(project, work)
        assignments = json.loads(
            (work / "assignments.json").read_text())["assignments"]
        auto = {a["topic"]: a["label"] for a in assignments}
        ann_path = tmp_path / "ann.csv"
        with open(ann_path, "w") as fh:
            fh.write("annotator,topic_id,first,second\n")
            for topic, label in auto.items():
                for e in ("e1", "e2"):
                    fh.write(f"{e},{topic},{label},\n")
        assert main(["--config", str(cfg_path), "validate", "--project",
                     str(work), "--annotations", str(ann_path)]) == 0
        out = capsys.readouterr().out
        assert "prop_first=1.000" in out

    def test_full_determinism_byte_identical(self, tmp_path):
        speeches, cb_path, cfg_path, _ = write_inputs(tmp_path,
                                                      docs_per_slice=30)
        run_a, run_b = tmp_path / "a", tmp_path / "b"
        run_pipeline(run_a, speeches, cb_path, cfg_path)
        run_pipeline(run_b, speeches, cb_path, cfg_path)
        for name in ARTIFACT_FILES:
            assert (run_a / name).read_bytes() == \
                (run_b / name).read_bytes(), name


class TestApi:
    def test_topics_shape(self, client):
        api, _, _ = client
        body = api.get("/api/topics").json()
        assert body["slice_count"] == 2
        assert len(body["topics"]) == 4
        first = body["topics"][0]
        assert len(first["top_words_by_slice"]) == 2
        assert first["pooled_top_words"]

    def test_assignments_include_similarity_rows(self, client):
        api, _, _ = client
        body = api.get("/api/assignments").json()
        assert len(body["assignments"]) == 4
        for a in body["assignments"]:
            assert "similarity" in a and len(a["similarity"]) >= 1

    def test_labels_surface_keywords(self, client):
        api, _, _ = client
        body = api.get("/api/labels").json()
        assert body["labels"]
        assert body["extra_labels"] == ["Somewhere Else"]
        assert all(item["words"] for item in body["labels"])

    def test_annotation_first_equals_second_400(self, client):
        api, _, labels = client
        resp = api.post("/api/annotations", json={
            "annotator": "e1", "topic_id": 0, "first": labels[0],
            "second": labels[0]})
        assert resp.status_code == 400

    def test_annotation_unknown_label_400(self, client):
        api, _, _ = client
        resp = api.post("/api/annotations", json={
            "annotator": "e1", "topic_id": 0, "first": "Made Up"})
        assert resp.status_code == 400

    def test_annotation_missing_field_400(self, client):
        api, _, _ = client
        resp = api.post("/api/annotations", json={"annotator": "e1"})
        assert resp.status_code == 400

    def test_annotation_resubmission_replaces(self, client):
        api, state, labels = client
        for first in (labels[0], labels[1]):
            resp = api.post("/api/annotations", json={
                "annotator": "e9", "topic_id": 1, "first": first})
            assert resp.status_code == 200
        effective = [r for r in state.read_annotations()
                     if r.annotator == "e9"]
        assert len(effective) == 2  # append-only log keeps both
        report = api.get("/api/report").json()
        row = next(r for r in report["rows"] if r["topic"] == 1)
        assert row["expert_labels"] == [labels[1]]

    def test_extra_label_annotation_accepted(self, client):
        api, _, _ = client
        resp = api.post("/api/annotations", json={
            "annotator": "e1", "topic_id": 2, "first": "Somewhere Else"})
        assert resp.status_code == 200

    def test_override_visible_in_assignments(self, client):
        api, _, _ = client
        resp = api.post("/api/overrides", json={
            "topic_id": 0, "label": "Custom Region", "annotator": "rev"})
        assert resp.status_code == 200
        body = api.get("/api/assignments").json()
        entry = next(a for a in body["assignments"] if a["topic"] == 0)
        assert entry["label"] == "Custom Region"
        assert entry["provenance"] == "human_override"

    def test_override_conflict_409(self, client):
        api, _, _ = client
        assert api.post("/api/overrides", json={
            "topic_id": 0, "label": "Taken", "annotator": "rev",
        }).status_code == 200
        resp = api.post("/api/overrides", json={
            "topic_id": 1, "label": "Taken", "annotator": "rev"})
        assert resp.status_code == 409

    def test_override_eviction_flagged(self, client):
        api, _, _ = client
        assignments = api.get("/api/assignments").json()["assignments"]
        target = assignments[1]["label"]
        assert target is not None
        resp = api.post("/api/overrides", json={
            "topic_id": 0, "label": target, "annotator": "rev"})
        assert resp.status_code == 200
        body = api.get("/api/assignments").json()["assignments"]
        evicted = next(a for a in body if a["topic"] == 1)
        assert evicted["label"] is None
        assert evicted["evicted"] is True

    def test_report_without_annotations_auto_only(self, client):
        api, _, _ = client
        report = api.get("/api/report").json()
        assert report["has_annotations"] is False
        for row in report["rows"]:
            assert row["expert_labels"] is None
            assert row["prop_first"] is None

    def test_report_parity_with_cli(self, client, tmp_path):
        api, state, labels = client
        api.post("/api/annotations", json={
            "annotator": "e1", "topic_id": 0, "first": labels[0]})
        api.post("/api/annotations", json={
            "annotator": "e2", "topic_id": 0, "first": labels[1]})
        out = tmp_path / "report.json"
        assert main(["report", "--project", str(state.root), "--out",
                     str(out), "--cardinality", "15"]) == 0
        cli_doc = json.loads(out.read_text())
        api_doc = api.get("/api/report").json()
        assert api_doc == cli_doc

    def test_crash_safety_reload_from_disk(self, client):
        api, state, labels = client
        api.post("/api/annotations", json={
            "annotator": "e7", "topic_id": 3, "first": labels[2]})
        api.post("/api/overrides", json={
            "topic_id": 3, "label": None, "annotator": "rev"})
        # simulate a restart: fresh state object over the same directory
        reopened = ProjectState(state.root)
        assert any(r.annotator == "e7" and r.topic_id == 3
                   for r in reopened.read_annotations())
        assert reopened.effective_overrides()[3][1] is None
        assert reopened.stage == "reviewed"


class TestStageTransitions:
    def test_stage_never_moves_backward(self, matched_project, tmp_path):
        import shutil
        project, cfg_path, _ = matched_project
        work = tmp_path / "proj"
        shutil.copytree(project, work)
        state = ProjectState(work)
        assert state.stage == "matched"
        state.advance("ingested")
        assert state.stage == "matched"
        state.advance("reviewed")
        assert state.stage == "reviewed"


class TestOpenApiDescription:
    def test_shipped_schema_matches_live_app(self, client):
        api, state, _ = client
        shipped = json.loads((ROOT / "docs" / "openapi.json").read_text())
        live = api.app.openapi()
        assert shipped == live


class TestAnnotationReadback:
    def test_get_annotations_filters_by_annotator(self, client):
        api, _, labels = client
        api.post("/api/annotations", json={
            "annotator": "alice", "topic_id": 0, "first": labels[0]})
        api.post("/api/annotations", json={
            "annotator": "bob", "topic_id": 1, "first": labels[1]})
        mine = api.get("/api/annotations",
                       params={"annotator": "alice"}).json()["annotations"]
        assert [r["annotator"] for r in mine] == ["alice"]
        everyone = api.get("/api/annotations").json()["annotations"]
        assert len(everyone) == 2
