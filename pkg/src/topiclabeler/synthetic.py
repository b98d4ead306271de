"""Deterministic synthetic corpora and codebooks with planted topics.

Used by the bundled demo and by the test suite: every generated word is
stem-stable (stemming maps it to itself) and avoids the default stoplists,
so the preprocessing pipeline passes it through unchanged and recovery can
be judged against the planted vocabularies exactly.
"""

from __future__ import annotations

import random

from ._porter import porter_stem
from .corpus import Document, default_custom_stopwords, default_stopwords

_ONSETS = ("b", "bl", "br", "cl", "cr", "d", "dr", "fl", "fr", "gl", "gr",
           "k", "kl", "kr", "m", "n", "p", "pl", "pr", "sk", "sl", "sm",
           "sn", "sp", "st", "str", "t", "tr", "v", "z")
_VOWELS = ("a", "e", "i", "o", "u")
_CODAS = ("b", "d", "g", "k", "l", "m", "n", "p", "r", "t", "x", "z")


def synthetic_words(count: int, seed: int = 0) -> list[str]:
    """Distinct pronounceable words that are fixed points of the stemmer."""
    rng = random.Random(seed)
    blocked = set(default_stopwords()) | {
        porter_stem(w) for w in default_custom_stopwords()}
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < count:
        n_syll = rng.randint(2, 3)
        word = "".join(
            rng.choice(_ONSETS) + rng.choice(_VOWELS)
            + (rng.choice(_CODAS) if rng.random() < 0.5 or i == n_syll - 1
               else "")
            for i in range(n_syll)
        )
        if word in seen or word in blocked:
            continue
        if porter_stem(word) != word:
            continue
        seen.add(word)
        words.append(word)
    return words


def planted_corpus(
    n_topics: int = 6,
    words_per_topic: int = 50,
    n_slices: int = 2,
    docs_per_slice: int = 200,
    tokens_per_doc: int = 60,
    seed: int = 0,
) -> tuple[list[Document], list[list[str]]]:
    """Documents drawn from disjoint per-topic vocabularies.

    Returns (documents, true_vocabularies); document i in each slice is
    drawn from topic i mod n_topics, one author per document.
    """
    words = synthetic_words(n_topics * words_per_topic, seed=seed)
    vocabs = [words[k * words_per_topic:(k + 1) * words_per_topic]
              for k in range(n_topics)]
    rng = random.Random(seed + 1)
    docs = []
    for sl in range(n_slices):
        for i in range(docs_per_slice):
            topic = i % n_topics
            tokens = rng.choices(vocabs[topic], k=tokens_per_doc)
            docs.append(Document(
                id=f"s{sl}-d{i}",
                author=f"speaker-{sl}-{i}",
                slice=sl,
                text=" ".join(tokens),
            ))
    return docs, vocabs


def planted_codebook(
    true_vocabs: list[list[str]],
    n_decoys: int = 2,
    words_per_subtopic: int = 12,
    subtopics_per_label: int = 3,
    seed: int = 0,
) -> tuple[dict, list[str]]:
    """Codebook JSON whose first len(true_vocabs) labels describe the
    planted topics; decoy labels draw from a disjoint extra vocabulary.

    Returns (codebook dict, true label names aligned with true_vocabs).
    """
    rng = random.Random(seed + 2)
    decoy_words = synthetic_words(
        len(true_vocabs) * len(true_vocabs[0]) + n_decoys * 40,
        seed=seed)[len(true_vocabs) * len(true_vocabs[0]):]
    decoy_vocabs = [decoy_words[i * 40:(i + 1) * 40] for i in range(n_decoys)]

    def entry(label: str, vocab: list[str]) -> dict:
        subs = []
        for j in range(subtopics_per_label):
            text = " ".join(rng.choices(vocab, k=words_per_subtopic))
            subs.append({"code": f"{label}-{j}", "description": text})
        return {"label": label, "subtopics": subs}

    true_labels = [f"Label {chr(ord('A') + k)}"
                   for k in range(len(true_vocabs))]
    topics = [entry(label, vocab)
              for label, vocab in zip(true_labels, true_vocabs)]
    for d in range(n_decoys):
        topics.append(entry(f"Decoy {d + 1}", decoy_vocabs[d]))
    return {"topics": topics}, true_labels
