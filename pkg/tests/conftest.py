import json

import numpy as np
import pytest

from topiclabeler.corpus import Document, PreprocessConfig, Vocabulary
from topiclabeler.topics import FitConfig, TopicModel


@pytest.fixture
def plain_cfg():
    """No stop lists, no stemming, no frequency filtering."""
    return PreprocessConfig(
        min_term_count=1, min_doc_freq=1, stopwords=frozenset(),
        custom_stopwords=frozenset(), stemmer="none")


@pytest.fixture
def default_cfg():
    return PreprocessConfig()


def make_doc(i, text, author=None, slice=0, procedural=False):
    return Document(id=f"d{i}", author=author or f"a{i}", slice=slice,
                    text=text, procedural_flag=procedural)


def make_model(phi_by_slice, vocabulary, theta=None, config=None):
    """TopicModel from raw per-slice phi rows (lists of lists)."""
    phi = np.asarray(phi_by_slice, dtype=np.float64)
    slices, k, v = phi.shape
    vocab = (vocabulary if isinstance(vocabulary, Vocabulary)
             else Vocabulary(vocabulary))
    if theta is None:
        theta = np.full((1, k), 1.0 / k)
    return TopicModel(
        k=k, slice_count=slices, phi=phi,
        theta=np.asarray(theta, dtype=np.float64),
        vocabulary=vocab,
        doc_ids=tuple(f"doc{i}" for i in range(len(theta))),
        doc_slices=tuple(0 for _ in range(len(theta))),
        config=config or FitConfig(k=k, iterations=2, burn_in=0),
    )


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path
