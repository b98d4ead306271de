"""Expert codebook parsing and tf-idf keyword extraction.

A codebook is a list of major topics, each with coded subtopic
descriptions. Subtopics are concatenated into one pseudo-document per
major topic; tf-idf over those pseudo-documents yields a weighted keyword
list per topic label.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import PreprocessConfig, tokenize_and_normalize

KEYWORDS_FORMAT = "keyword_lists"
KEYWORDS_VERSION = 1


@dataclass(frozen=True)
class Subtopic:
    code: str
    description: str


@dataclass(frozen=True)
class CodebookEntry:
    label: str
    subtopics: tuple[Subtopic, ...]


@dataclass(frozen=True)
class Codebook:
    entries: tuple[CodebookEntry, ...]

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]


@dataclass(frozen=True)
class KeywordList:
    """Label plus its weighted stems, heaviest first.

    truncated is set when fewer positive-weight stems existed than the
    requested cardinality.
    """

    label: str
    words: tuple[tuple[str, float], ...]
    cardinality: int
    truncated: bool = False

    def __post_init__(self):
        stems = [w for w, _ in self.words]
        if len(set(stems)) != len(stems):
            raise ValueError(f"duplicate stems in keyword list "
                             f"for {self.label!r}")
        if len(self.words) > self.cardinality:
            raise ValueError("keyword list longer than its cardinality")
        for (w1, s1), (w2, s2) in zip(self.words, self.words[1:]):
            if s1 < s2 or (s1 == s2 and w1 > w2):
                raise ValueError("keyword list is not sorted by "
                                 "(weight desc, stem asc)")

    @property
    def stems(self) -> list[str]:
        return [w for w, _ in self.words]


def parse_codebook(path: str | Path, format: str = "json") -> Codebook:
    """Load a codebook JSON file.

    Schema: {"topics": [{"label": str,
    "subtopics": [{"code": str, "description": str}]}]}.
    """
    if format != "json":
        raise ValueError(f"unsupported codebook format {format!r}")
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"codebook {path} is not valid JSON: "
                             f"{exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("topics"), list):
        raise ValueError("codebook must be an object with a 'topics' list")
    entries = []
    seen = set()
    for i, topic in enumerate(doc["topics"]):
        label = topic.get("label")
        if not isinstance(label, str) or not label.strip():
            raise ValueError(f"topic {i}: label must be a non-empty string")
        if label in seen:
            raise ValueError(f"duplicate major topic label {label!r}")
        seen.add(label)
        subs = topic.get("subtopics")
        if not isinstance(subs, list) or not subs:
            raise ValueError(f"topic {label!r}: needs at least one subtopic")
        parsed_subs = []
        for j, sub in enumerate(subs):
            desc = sub.get("description")
            if not isinstance(desc, str) or not desc.strip():
                raise ValueError(
                    f"topic {label!r} subtopic {j}: empty description")
            parsed_subs.append(
                Subtopic(code=str(sub.get("code", j)), description=desc))
        entries.append(CodebookEntry(label=label,
                                     subtopics=tuple(parsed_subs)))
    return Codebook(entries=tuple(entries))


def concat_major_topics(cb: Codebook) -> list[tuple[str, str]]:
    """One pseudo-document per major topic: subtopic descriptions joined
    in order with single spaces."""
    return [
        (entry.label,
         " ".join(sub.description for sub in entry.subtopics))
        for entry in cb.entries
    ]


def tfidf_keywords(cb: Codebook, cfg: PreprocessConfig,
                   n: int = 20) -> list[KeywordList]:
    """Weighted keyword lists over the major-topic pseudo-documents.

    weight(w, d) = tf(w, d) * ln((1 + N) / (1 + df(w))) with N the number
    of major topics. Stems occurring in every topic get weight 0 and never
    enter a list; topics with no positive-weight stem are omitted.
    """
    if n < 1:
        raise ValueError("keyword cardinality must be >= 1")
    pseudo_docs = concat_major_topics(cb)
    token_lists = {label: tokenize_and_normalize(text, cfg)
                   for label, text in pseudo_docs}
    n_topics = len(pseudo_docs)
    df: Counter[str] = Counter()
    for tokens in token_lists.values():
        df.update(set(tokens))

    out = []
    for label, _ in pseudo_docs:
        tf = Counter(token_lists[label])
        weighted = []
        for stem, count in tf.items():
            idf = math.log((1 + n_topics) / (1 + df[stem]))
            if idf > 0:
                weighted.append((stem, count * idf))
        if not weighted:
            continue
        weighted.sort(key=lambda item: (-item[1], item[0]))
        out.append(KeywordList(
            label=label,
            words=tuple(weighted[:n]),
            cardinality=n,
            truncated=len(weighted) < n,
        ))
    return out


def keyword_lists_to_payload(lists: list[KeywordList], cb: Codebook,
                             cfg: PreprocessConfig, n: int) -> dict:
    produced = {kl.label for kl in lists}
    return {
        "cardinality": n,
        "preprocess": cfg.to_dict(),
        "lists": [
            {
                "label": kl.label,
                "words": [[w, s] for w, s in kl.words],
                "truncated": kl.truncated,
            }
            for kl in lists
        ],
        "skipped_labels": [l for l in cb.labels if l not in produced],
    }


def keyword_lists_from_payload(payload: dict) -> list[KeywordList]:
    return [
        KeywordList(
            label=item["label"],
            words=tuple((w, float(s)) for w, s in item["words"]),
            cardinality=payload["cardinality"],
            truncated=item.get("truncated", False),
        )
        for item in payload["lists"]
    ]
