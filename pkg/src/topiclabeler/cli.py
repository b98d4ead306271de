"""Command-line pipeline driver.

Subcommands walk the project through ingest -> preprocess -> fit ->
keywords -> match -> validate -> report, with `select-k` for model-size
exploration and `serve` for the review API/UI. Exit codes: 0 success,
2 validation/usage error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import codebook as cb_mod
from . import corpus as corpus_mod
from . import labeling, topics, validation
from .project import ProjectState
from .serialize import write_artifact

SELECTK_FORMAT = "selectk"
SELECTK_VERSION = 1


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ValueError(f"config file not found: {p}")
    if p.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError as exc:
            raise ValueError(
                "TOML config requires Python 3.11+; use a JSON config "
                "on this interpreter") from exc
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    with open(p, encoding="utf-8") as fh:
        return json.load(fh)


def _preprocess_config(config: dict, workers: int) -> corpus_mod.PreprocessConfig:
    section = dict(config.get("preprocess", {}))
    stopwords_path = section.pop("stopwords_file", None)
    custom_path = section.pop("custom_stopwords_file", None)
    if stopwords_path:
        section["stopwords"] = _read_wordfile(stopwords_path)
    if custom_path:
        section["custom_stopwords"] = _read_wordfile(custom_path)
    return corpus_mod.PreprocessConfig.from_dict(section) \
        if section else corpus_mod.PreprocessConfig()


def _read_wordfile(path: str) -> list[str]:
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.append(line)
    return words


def _fit_config(args, config: dict) -> topics.FitConfig:
    section = dict(config.get("fit", {}))
    if getattr(args, "topics", None) is not None:
        section["k"] = args.topics
    if args.seed is not None:
        section["seed"] = args.seed
    if getattr(args, "iterations", None) is not None:
        section["iterations"] = args.iterations
    if getattr(args, "burn_in", None) is not None:
        section["burn_in"] = args.burn_in
    if getattr(args, "chaining", None) is not None:
        section["chaining"] = args.chaining
    if "k" not in section:
        raise ValueError("topic count required: pass --topics or set "
                         "fit.k in the config")
    return topics.FitConfig.from_dict(section)


def _match_settings(args, config: dict) -> dict:
    section = dict(config.get("match", {}))
    out = {
        "measure": section.get("measure", "jaccard"),
        "strategy": section.get("strategy", "greedy_global"),
        "min_score": section.get("min_score", 0.0),
        "cardinality": section.get("cardinality", 20),
    }
    if getattr(args, "measure", None):
        out["measure"] = {"rouge": "rouge1_f1"}.get(args.measure,
                                                    args.measure)
    if getattr(args, "strategy", None):
        out["strategy"] = {"greedy": "greedy_global"}.get(args.strategy,
                                                          args.strategy)
    if getattr(args, "min_score", None) is not None:
        out["min_score"] = args.min_score
    if getattr(args, "cardinality", None) is not None:
        out["cardinality"] = args.cardinality
    return out


# -- subcommands -------------------------------------------------------


def cmd_ingest(args) -> int:
    state = ProjectState(args.project)
    docs = corpus_mod.ingest(args.input, format=args.format)
    state.write_documents(docs)
    state.advance("ingested")
    print(f"ingested {len(docs)} documents -> {state.path('documents')}")
    return 0


def cmd_preprocess(args) -> int:
    state = ProjectState(args.project)
    config = _load_config(args.config)
    cfg = _preprocess_config(config, args.workers)
    docs = state.read_documents()
    aggregated = corpus_mod.aggregate(docs)
    corpus = corpus_mod.build_corpus(aggregated, cfg, workers=args.workers)
    state.write_corpus(corpus)
    state.advance("ingested")
    print(f"corpus: {len(corpus.docs)} documents, "
          f"{len(corpus.vocabulary)} terms, "
          f"{corpus.slice_count} slices, "
          f"{len(corpus.dropped_doc_ids)} dropped "
          f"-> {state.path('corpus')}")
    return 0


def cmd_fit(args) -> int:
    state = ProjectState(args.project)
    config = _load_config(args.config)
    cfg = _fit_config(args, config)
    corpus = state.read_corpus()
    model = topics.fit(corpus, cfg)
    state.write_model(model)
    state.advance("fitted")
    print(f"fitted k={cfg.k} over {model.slice_count} slices "
          f"-> {state.path('model')}")
    return 0


def cmd_select_k(args) -> int:
    state = ProjectState(args.project)
    config = _load_config(args.config)
    corpus = state.read_corpus()
    k_values = [int(x) for x in args.k_values.split(",") if x.strip()]
    section = dict(config.get("fit", {}))
    section.pop("k", None)
    if args.seed is not None:
        section["seed"] = args.seed
    if args.iterations is not None:
        section["iterations"] = args.iterations
    template = topics.FitConfig(k=1, **section)
    rows = topics.select_k(corpus, k_values, template, n=args.metric_words)
    write_artifact(state.path("selectk"), SELECTK_FORMAT, SELECTK_VERSION,
                   {"rows": rows, "metric_words": args.metric_words})
    print(f"{'K':>4}  {'mean_coherence':>15}  {'mean_exclusivity':>17}")
    for row in rows:
        print(f"{row['k']:>4}  {row['mean_coherence']:>15.4f}  "
              f"{row['mean_exclusivity']:>17.4f}")
    return 0


def cmd_keywords(args) -> int:
    state = ProjectState(args.project)
    config = _load_config(args.config)
    cfg = _preprocess_config(config, args.workers)
    book = cb_mod.parse_codebook(args.codebook)
    n = args.cardinality if args.cardinality is not None \
        else config.get("match", {}).get("cardinality", 20)
    lists = cb_mod.tfidf_keywords(book, cfg, n=n)
    state.root.mkdir(parents=True, exist_ok=True)
    state.write_keywords(
        cb_mod.keyword_lists_to_payload(lists, book, cfg, n))
    print(f"extracted {len(lists)} keyword lists (cardinality {n}) "
          f"-> {state.path('keywords')}")
    return 0


def cmd_match(args) -> int:
    state = ProjectState(args.project)
    config = _load_config(args.config)
    settings = _match_settings(args, config)
    model = state.read_model()
    keyword_lists, kw_payload = state.read_keywords()
    n = settings["cardinality"]
    topic_sets = [
        labeling.WordSet.of(str(k), topics.pooled_top_words(model, k, n))
        for k in range(model.k)
    ]
    label_sets = [labeling.WordSet.of(kl.label, kl.stems)
                  for kl in keyword_lists]
    matrix = labeling.similarity_matrix(topic_sets, label_sets,
                                        measure=settings["measure"])
    assignments = labeling.transfer_labels(
        matrix, strategy=settings["strategy"],
        min_score=settings["min_score"])
    state.write_matrix(matrix)
    state.write_assignments(labeling.assignments_to_payload(
        assignments, matrix, settings["strategy"], settings["min_score"]))
    state.advance("matched", config={"match": settings})
    labeled = sum(1 for a in assignments if a.label is not None)
    print(f"matched {labeled}/{len(assignments)} topics "
          f"({settings['measure']}, {settings['strategy']}) "
          f"-> {state.path('assignments')}")
    return 0


def cmd_validate(args) -> int:
    state = ProjectState(args.project)
    config = _load_config(args.config)
    state.require_stage("matched", "requires label assignments; run "
                        "`match` first")
    _, kw_payload = state.read_keywords()
    allowed = {item["label"] for item in kw_payload["lists"]}
    allowed.update(kw_payload.get("skipped_labels", []))
    allowed.update(config.get("extra_labels", []))
    records = validation.parse_annotations(args.annotations,
                                           allowed_labels=allowed)
    for rec in records:
        state.append_annotation(rec)
    annotations = state.read_annotations()
    assignments = state.current_assignments()
    props = validation.agreement_proportions(annotations, assignments)
    kappas = validation.per_topic_kappa(annotations)
    print(f"imported {len(records)} annotations "
          f"({len(annotations)} total on log)")
    for topic_id in sorted(props):
        first, second = props[topic_id]
        kap = kappas.get(topic_id)
        kap_str = f"{kap:.3f}" if kap is not None else "n/a"
        print(f"topic {topic_id}: prop_first={first:.3f} "
              f"prop_second={second:.3f} kappa={kap_str}")
    return 0


def cmd_report(args) -> int:
    state = ProjectState(args.project)
    state.require_stage("matched", "requires label assignments; run "
                        "`match` first")
    model = state.read_model()
    assignments = state.current_assignments()
    annotations = state.read_annotations()
    report = validation.build_report(assignments, annotations, model,
                                     n=args.cardinality or 20)
    out = Path(args.out) if args.out else state.root / f"report.{args.fmt}"
    if args.fmt == "csv":
        validation.report_to_csv(report, out)
    else:
        write_artifact(out, validation.REPORT_FORMAT,
                       validation.REPORT_VERSION, report.to_payload())
    summary = report.summary()
    print(f"report: {summary['topics']} topics, {summary['labeled']} "
          f"labeled, {summary['annotated']} annotated -> {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    state = ProjectState(args.project)
    state.require_stage("matched",
                        "requires matched assignments; run `match` first")
    config = _load_config(args.config)
    ui_dir = args.ui or config.get("ui_dir")
    app = create_app(state, extra_labels=config.get("extra_labels", []),
                     ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topiclabeler",
        description="Time-sliced topic estimation with codebook-driven "
                    "label transfer and expert validation.")
    parser.add_argument("--config", help="JSON (or TOML on 3.11+) config "
                        "file mirroring module defaults")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for every random step")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for preprocessing")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read raw JSONL documents")
    p.add_argument("--project", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="jsonl", choices=["jsonl"])
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess",
                       help="aggregate per author/slice and build the "
                            "numeric corpus")
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("fit", help="estimate per-slice topics")
    p.add_argument("--project", required=True)
    p.add_argument("--topics", type=int, help="number of topics K")
    p.add_argument("--iterations", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--chaining", choices=["independent", "warm_start"])
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select-k",
                       help="coherence/exclusivity frontier over "
                            "candidate K values")
    p.add_argument("--project", required=True)
    p.add_argument("--k-values", required=True,
                   help="comma-separated candidate K list")
    p.add_argument("--iterations", type=int)
    p.add_argument("--metric-words", type=int, default=10)
    p.set_defaults(func=cmd_select_k)

    p = sub.add_parser("keywords",
                       help="tf-idf keyword lists from a codebook")
    p.add_argument("--project", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--cardinality", type=int)
    p.set_defaults(func=cmd_keywords)

    p = sub.add_parser("match",
                       help="similarity matrix and label transfer")
    p.add_argument("--project", required=True)
    p.add_argument("--measure", choices=["jaccard", "rouge", "rouge1_f1"])
    p.add_argument("--strategy", choices=["greedy", "greedy_global",
                                          "optimal"])
    p.add_argument("--min-score", dest="min_score", type=float)
    p.add_argument("--cardinality", type=int)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("validate",
                       help="import expert annotations and print "
                            "agreement statistics")
    p.add_argument("--project", required=True)
    p.add_argument("--annotations", required=True,
                   help="CSV or JSONL annotation file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="Table-style agreement report")
    p.add_argument("--project", required=True)
    p.add_argument("--format", dest="fmt", default="json",
                   choices=["json", "csv"])
    p.add_argument("--cardinality", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the review HTTP API/UI")
    p.add_argument("--project", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="directory of built UI assets to serve")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {exc.__class__.__name__}: {exc}",
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
