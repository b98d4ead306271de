#!/usr/bin/env python3
"""Regenerate the bundled demo corpus and codebook.

Writes demo/speeches.jsonl (300 documents, 8 planted topics over 2 time
slices) and demo/codebook.json (8 labels whose descriptions draw from the
corresponding planted vocabularies). Deterministic; the committed files
should only change when the generator changes.
"""

import json
from pathlib import Path

from topiclabeler.synthetic import planted_codebook, planted_corpus

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "demo"
SEED = 20240101


def main() -> None:
    DEMO.mkdir(exist_ok=True)
    docs, vocabs = planted_corpus(
        n_topics=8, words_per_topic=25, n_slices=2, docs_per_slice=150,
        tokens_per_doc=40, seed=SEED)
    with open(DEMO / "speeches.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps({
                "id": doc.id, "author": doc.author, "slice": doc.slice,
                "text": doc.text,
            }, sort_keys=True) + "\n")

    codebook, _ = planted_codebook(vocabs, n_decoys=0,
                                   words_per_subtopic=14,
                                   subtopics_per_label=3, seed=SEED)
    with open(DEMO / "codebook.json", "w", encoding="utf-8") as fh:
        json.dump(codebook, fh, indent=2, sort_keys=True)
        fh.write("\n")

    config = {
        "preprocess": {"min_term_count": 20, "min_doc_freq": 5},
        "fit": {"k": 8, "iterations": 300, "burn_in": 50, "seed": 7,
                "chaining": "warm_start"},
        "match": {"measure": "jaccard", "strategy": "greedy_global",
                  "min_score": 0.0, "cardinality": 20},
        "extra_labels": ["Northern Ireland"],
    }
    with open(DEMO / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {DEMO / 'speeches.jsonl'} ({len(docs)} docs), "
          f"{DEMO / 'codebook.json'}, {DEMO / 'config.json'}")


if __name__ == "__main__":
    main()
