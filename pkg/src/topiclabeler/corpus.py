"""Corpus ingest, per-author/slice aggregation, and preprocessing.

Raw speech-like records come in as JSONL, get merged into one document per
(author, slice) pair, and are reduced to a numeric term-count corpus after
tokenization, stemming, stopword removal, and frequency filtering.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from collections import Counter, OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from ._porter import porter_stem

logger = logging.getLogger(__name__)

CORPUS_FORMAT = "corpus"
CORPUS_VERSION = 1
DOCUMENTS_FORMAT = "documents"
DOCUMENTS_VERSION = 1


class IngestError(ValueError):
    """Malformed input record; message carries the offending line number."""


class EmptyCorpusError(ValueError):
    """Every document became empty after preprocessing."""


@dataclass(frozen=True)
class Document:
    """One speech record: an author's text within a time slice."""

    id: str
    author: str
    slice: int
    text: str
    procedural_flag: bool = False


def _load_wordlist(name: str) -> frozenset[str]:
    data = resources.files("topiclabeler.data").joinpath(name).read_text("utf-8")
    words = set()
    for line in data.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    return _load_wordlist("stopwords_english.txt")


def default_custom_stopwords() -> frozenset[str]:
    return _load_wordlist("custom_stopwords.txt")


@dataclass(frozen=True)
class PreprocessConfig:
    """Normalization and vocabulary-filter settings, shared corpus-wide.

    The same config must be reused for the codebook side so both
    vocabularies are produced by identical rules.
    """

    min_term_count: int = 50
    min_doc_freq: int = 5
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    custom_stopwords: frozenset[str] = field(
        default_factory=default_custom_stopwords)
    stemmer: str = "porter"
    lowercase: bool = True
    strip_punctuation: bool = True
    strip_numbers: bool = True
    strip_symbols: bool = True
    strip_hyphens: bool = True
    strip_single_letters: bool = True

    def __post_init__(self):
        if self.min_term_count < 1:
            raise ValueError("min_term_count must be >= 1")
        if self.min_doc_freq < 1:
            raise ValueError("min_doc_freq must be >= 1")
        if self.stemmer not in ("porter", "none"):
            raise ValueError(f"unknown stemmer {self.stemmer!r}")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        object.__setattr__(self, "custom_stopwords",
                           frozenset(self.custom_stopwords))

    def to_dict(self) -> dict:
        return {
            "min_term_count": self.min_term_count,
            "min_doc_freq": self.min_doc_freq,
            "stopwords": sorted(self.stopwords),
            "custom_stopwords": sorted(self.custom_stopwords),
            "stemmer": self.stemmer,
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "strip_numbers": self.strip_numbers,
            "strip_symbols": self.strip_symbols,
            "strip_hyphens": self.strip_hyphens,
            "strip_single_letters": self.strip_single_letters,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessConfig":
        kwargs = dict(d)
        for key in ("stopwords", "custom_stopwords"):
            if key in kwargs:
                kwargs[key] = frozenset(kwargs[key])
        return cls(**kwargs)


class Vocabulary:
    """Ordered stem list with its inverse index map."""

    def __init__(self, terms: Sequence[str]):
        self.terms: list[str] = list(terms)
        self.index: dict[str, int] = {t: i for i, t in enumerate(self.terms)}
        if len(self.index) != len(self.terms):
            raise ValueError("vocabulary contains duplicate terms")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.terms == other.terms


@dataclass(frozen=True)
class Corpus:
    """Immutable numeric corpus: vocabulary plus sparse per-doc counts.

    docs holds (doc id, slice, [(term index, count), ...]) with counts >= 1
    and entries sorted by term index.
    """

    vocabulary: Vocabulary
    docs: tuple[tuple[str, int, tuple[tuple[int, int], ...]], ...]
    slice_count: int
    dropped_doc_ids: tuple[str, ...] = ()
    preprocess: PreprocessConfig | None = None

    def __post_init__(self):
        v = len(self.vocabulary)
        for doc_id, sl, entries in self.docs:
            if not 0 <= sl < self.slice_count:
                raise ValueError(
                    f"document {doc_id!r} has slice {sl} outside "
                    f"[0, {self.slice_count})")
            for idx, count in entries:
                if not 0 <= idx < v:
                    raise ValueError(
                        f"document {doc_id!r} references term index {idx} "
                        f"outside the vocabulary")
                if count < 1:
                    raise ValueError(
                        f"document {doc_id!r} has non-positive count for "
                        f"term {idx}")

    @property
    def doc_ids(self) -> list[str]:
        return [d[0] for d in self.docs]

    @property
    def doc_slices(self) -> list[int]:
        return [d[1] for d in self.docs]

    def to_payload(self) -> dict:
        return {
            "vocabulary": self.vocabulary.terms,
            "slice_count": self.slice_count,
            "docs": [[doc_id, sl, [list(e) for e in entries]]
                     for doc_id, sl, entries in self.docs],
            "dropped_docs": list(self.dropped_doc_ids),
            "preprocess": (self.preprocess.to_dict()
                           if self.preprocess else None),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Corpus":
        pre = payload.get("preprocess")
        return cls(
            vocabulary=Vocabulary(payload["vocabulary"]),
            docs=tuple(
                (doc_id, sl, tuple((int(i), int(c)) for i, c in entries))
                for doc_id, sl, entries in payload["docs"]),
            slice_count=payload["slice_count"],
            dropped_doc_ids=tuple(payload.get("dropped_docs", [])),
            preprocess=PreprocessConfig.from_dict(pre) if pre else None,
        )


def ingest(path: str | Path, format: str = "jsonl") -> list[Document]:
    """Read raw documents from a JSONL file, one record per line.

    Schema: {"id": str?, "author": str, "slice": int, "text": str,
    "procedural": bool?}. Blank lines are skipped. Errors name the line.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported ingest format {format!r}")
    path = Path(path)
    docs: list[Document] = []
    seen_ids: set[str] = set()
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise IngestError(
                    f"line {lineno}: invalid UTF-8 ({exc})") from exc
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(
                    f"line {lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise IngestError(f"line {lineno}: record is not an object")
            for field_name in ("author", "slice", "text"):
                if field_name not in record:
                    raise IngestError(
                        f"line {lineno}: missing required field "
                        f"{field_name!r}")
            author = record["author"]
            sl = record["slice"]
            text = record["text"]
            if not isinstance(author, str) or not author:
                raise IngestError(f"line {lineno}: author must be a "
                                  f"non-empty string")
            if not isinstance(sl, int) or isinstance(sl, bool) or sl < 0:
                raise IngestError(f"line {lineno}: slice must be a "
                                  f"non-negative integer")
            if not isinstance(text, str) or not text.strip():
                raise IngestError(f"line {lineno}: text must be a "
                                  f"non-empty string")
            doc_id = record.get("id")
            if doc_id is None:
                doc_id = f"doc-{lineno}"
            if not isinstance(doc_id, str):
                raise IngestError(f"line {lineno}: id must be a string")
            if doc_id in seen_ids:
                raise IngestError(f"line {lineno}: duplicate id {doc_id!r}")
            seen_ids.add(doc_id)
            docs.append(Document(
                id=doc_id,
                author=author,
                slice=sl,
                text=text,
                procedural_flag=bool(record.get("procedural", False)),
            ))
    return docs


def aggregate(docs: Iterable[Document]) -> list[Document]:
    """Merge each author's texts within a slice into one document.

    Procedural records are dropped first; surviving texts are joined with
    single spaces in input order. Output order follows first appearance of
    each (author, slice) pair.
    """
    groups: "OrderedDict[tuple[str, int], list[str]]" = OrderedDict()
    for doc in docs:
        if doc.procedural_flag:
            continue
        groups.setdefault((doc.author, doc.slice), []).append(doc.text)
    return [
        Document(
            id=f"{author}@s{sl}",
            author=author,
            slice=sl,
            text=" ".join(texts),
        )
        for (author, sl), texts in groups.items()
    ]


def _separator_chars_one(cfg: PreprocessConfig, text: str) -> str:
    out = []
    for ch in text:
        if ch == "-" or ch in "‐‑‒–—−":
            out.append(" " if cfg.strip_hyphens else ch)
            continue
        cat = unicodedata.category(ch)
        if cat.startswith("P"):
            out.append(" " if cfg.strip_punctuation else ch)
        elif cat.startswith("S"):
            out.append(" " if cfg.strip_symbols else ch)
        else:
            out.append(ch)
    return "".join(out)


@lru_cache(maxsize=8)
def _normalized_stopset(cfg: PreprocessConfig) -> frozenset[str]:
    # stoplist entries go through the same character handling as tokens so
    # forms like "don't" match their stripped counterparts
    out = set()
    for entry in cfg.stopwords:
        entry = entry.lower() if cfg.lowercase else entry
        out.update(_separator_chars_one(cfg, entry).split())
    return frozenset(out)


def _stem(cfg: PreprocessConfig, token: str) -> str:
    return porter_stem(token) if cfg.stemmer == "porter" else token


@lru_cache(maxsize=8)
def _custom_stemset(cfg: PreprocessConfig) -> frozenset[str]:
    words = set()
    for entry in cfg.custom_stopwords:
        entry = entry.lower() if cfg.lowercase else entry
        words.update(_separator_chars_one(cfg, entry).split())
    return frozenset(_stem(cfg, w) for w in words)


def tokenize_and_normalize(text: str, cfg: PreprocessConfig) -> list[str]:
    """Turn raw text into the ordered list of surviving stems.

    Pipeline: lowercase, strip punctuation/symbols/hyphens (as separators),
    drop numeric and single-letter tokens, drop stopwords, stem, drop
    custom stopwords (matched on stems).
    """
    if cfg.lowercase:
        text = text.lower()
    stopset = _normalized_stopset(cfg)
    customset = _custom_stemset(cfg)
    out = []
    for token in _separator_chars_one(cfg, text).split():
        if cfg.strip_numbers and not any(c.isalpha() for c in token):
            continue
        if cfg.strip_single_letters and len(token) == 1:
            continue
        if token in stopset:
            continue
        stem = _stem(cfg, token)
        if stem in customset:
            continue
        out.append(stem)
    return out


def _tokenize_batch(texts: list[str], cfg: PreprocessConfig) -> list[list[str]]:
    return [tokenize_and_normalize(t, cfg) for t in texts]


def _tokenize_all(docs: Sequence[Document], cfg: PreprocessConfig,
                  workers: int) -> list[list[str]]:
    texts = [d.text for d in docs]
    if workers <= 1 or len(texts) < 2 * workers:
        return _tokenize_batch(texts, cfg)
    # chunked process pool; chunk results are concatenated in input order so
    # the outcome is identical for any worker count
    chunk = (len(texts) + workers - 1) // workers
    batches = [texts[i:i + chunk] for i in range(0, len(texts), chunk)]
    out: list[list[str]] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for result in pool.map(_tokenize_batch, batches,
                               [cfg] * len(batches)):
            out.extend(result)
    return out


def _learn_vocabulary(token_lists: Sequence[list[str]],
                      cfg: PreprocessConfig) -> Vocabulary:
    term_count: Counter[str] = Counter()
    doc_freq: Counter[str] = Counter()
    for tokens in token_lists:
        term_count.update(tokens)
        doc_freq.update(set(tokens))
    kept = sorted(
        t for t, c in term_count.items()
        if c >= cfg.min_term_count and doc_freq[t] >= cfg.min_doc_freq)
    return Vocabulary(kept)


def _vectorize(docs: Sequence[Document], token_lists: Sequence[list[str]],
               vocabulary: Vocabulary, cfg: PreprocessConfig) -> Corpus:
    entries = []
    dropped = []
    max_slice = -1
    for doc, tokens in zip(docs, token_lists):
        counts = Counter(t for t in tokens if t in vocabulary.index)
        if not counts:
            dropped.append(doc.id)
            continue
        sparse = tuple(sorted(
            (vocabulary.index[t], c) for t, c in counts.items()))
        entries.append((doc.id, doc.slice, sparse))
        max_slice = max(max_slice, doc.slice)
    if not entries:
        raise EmptyCorpusError(
            "empty corpus: no document survived preprocessing")
    if dropped:
        logger.info("dropped %d empty documents: %s", len(dropped),
                    ", ".join(dropped[:10]))
    return Corpus(
        vocabulary=vocabulary,
        docs=tuple(entries),
        slice_count=max_slice + 1,
        dropped_doc_ids=tuple(dropped),
        preprocess=cfg,
    )


def build_corpus(docs: Sequence[Document], cfg: PreprocessConfig,
                 workers: int = 1) -> Corpus:
    """Tokenize aggregated documents and apply the frequency filters.

    The vocabulary keeps exactly the stems with total count >=
    min_term_count and document frequency >= min_doc_freq (computed over
    the documents as given, i.e. after aggregation). Documents left empty
    are dropped and recorded in dropped_doc_ids.
    """
    token_lists = _tokenize_all(docs, cfg, workers)
    vocabulary = _learn_vocabulary(token_lists, cfg)
    return _vectorize(docs, token_lists, vocabulary, cfg)


class CorpusVectorizer(BaseEstimator, TransformerMixin):
    """Estimator wrapper around the preprocessing pipeline.

    fit learns the filtered vocabulary from a document list; transform
    produces the sparse Corpus. Mirrors the CountVectorizer idiom so the
    pipeline composes with standard tooling.
    """

    def __init__(self, min_term_count=50, min_doc_freq=5, stopwords=None,
                 custom_stopwords=None, stemmer="porter", lowercase=True,
                 strip_punctuation=True, strip_numbers=True,
                 strip_symbols=True, strip_hyphens=True,
                 strip_single_letters=True, workers=1):
        self.min_term_count = min_term_count
        self.min_doc_freq = min_doc_freq
        self.stopwords = stopwords
        self.custom_stopwords = custom_stopwords
        self.stemmer = stemmer
        self.lowercase = lowercase
        self.strip_punctuation = strip_punctuation
        self.strip_numbers = strip_numbers
        self.strip_symbols = strip_symbols
        self.strip_hyphens = strip_hyphens
        self.strip_single_letters = strip_single_letters
        self.workers = workers

    def _config(self) -> PreprocessConfig:
        kwargs = {}
        if self.stopwords is not None:
            kwargs["stopwords"] = frozenset(self.stopwords)
        if self.custom_stopwords is not None:
            kwargs["custom_stopwords"] = frozenset(self.custom_stopwords)
        return PreprocessConfig(
            min_term_count=self.min_term_count,
            min_doc_freq=self.min_doc_freq,
            stemmer=self.stemmer,
            lowercase=self.lowercase,
            strip_punctuation=self.strip_punctuation,
            strip_numbers=self.strip_numbers,
            strip_symbols=self.strip_symbols,
            strip_hyphens=self.strip_hyphens,
            strip_single_letters=self.strip_single_letters,
            **kwargs,
        )

    def fit(self, X: Sequence[Document], y=None):
        cfg = self._config()
        token_lists = _tokenize_all(X, cfg, self.workers)
        self.vocabulary_ = _learn_vocabulary(token_lists, cfg)
        return self

    def transform(self, X: Sequence[Document]) -> Corpus:
        if not hasattr(self, "vocabulary_"):
            raise ValueError("CorpusVectorizer is not fitted")
        cfg = self._config()
        token_lists = _tokenize_all(X, cfg, self.workers)
        return _vectorize(X, token_lists, self.vocabulary_, cfg)

    def fit_transform(self, X: Sequence[Document], y=None, **kwargs) -> Corpus:
        cfg = self._config()
        token_lists = _tokenize_all(X, cfg, self.workers)
        self.vocabulary_ = _learn_vocabulary(token_lists, cfg)
        return _vectorize(X, token_lists, self.vocabulary_, cfg)
