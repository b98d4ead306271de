#!/usr/bin/env python3
"""Regenerate docs/openapi.json from the live FastAPI app.

The schema is content-independent, so a throwaway matched project is built
in a temp directory just to instantiate the app.
"""

import json
import tempfile
from pathlib import Path

from topiclabeler.api import create_app
from topiclabeler.cli import main
from topiclabeler.project import ProjectState
from topiclabeler.synthetic import planted_codebook, planted_corpus

ROOT = Path(__file__).resolve().parent.parent


def build_app(tmp: Path):
    docs, vocabs = planted_corpus(n_topics=2, words_per_topic=15,
                                  n_slices=1, docs_per_slice=20,
                                  tokens_per_doc=20, seed=1)
    speeches = tmp / "speeches.jsonl"
    with open(speeches, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "author": d.author,
                                 "slice": d.slice, "text": d.text}) + "\n")
    codebook, _ = planted_codebook(vocabs, n_decoys=0, seed=1)
    cb_path = tmp / "codebook.json"
    cb_path.write_text(json.dumps(codebook), encoding="utf-8")
    cfg_path = tmp / "config.json"
    cfg_path.write_text(json.dumps({
        "preprocess": {"min_term_count": 2, "min_doc_freq": 2},
        "fit": {"k": 2, "iterations": 20, "burn_in": 5, "seed": 1},
    }), encoding="utf-8")
    project = tmp / "project"
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
    return create_app(ProjectState(project))


def main_script() -> None:
    with tempfile.TemporaryDirectory() as td:
        app = build_app(Path(td))
        schema = app.openapi()
    out = ROOT / "docs" / "openapi.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main_script()
