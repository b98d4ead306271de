"""Acceptance suite: one test per release criterion.

Each test prints a PASS line (visible with -s or -rP) after its
assertions; expected values come from independent oracles computed inside
this module, never from the implementation under test.
"""

import itertools
import json
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from topiclabeler.cli import main
from topiclabeler.corpus import PreprocessConfig, aggregate, build_corpus
from topiclabeler.labeling import (SimilarityMatrix, WordSet, jaccard,
                                   rouge1_f1, transfer_labels,
                                   unused_labels)
from topiclabeler.synthetic import planted_codebook, planted_corpus
from topiclabeler.validation import (DegenerateAgreementWarning,
                                     fleiss_kappa)

from conftest import make_doc


def grid_matrix(values):
    values = np.asarray(values, dtype=np.float64)
    t, l = values.shape
    return SimilarityMatrix(topic_ids=tuple(range(t)),
                            labels=tuple(f"L{j}" for j in range(l)),
                            values=values, measure="jaccard")


class TestMetricOracles:
    def test_measures_match_brute_force_and_argmax_parity(self):
        start = time.time()
        rng = np.random.default_rng(2024)
        universe = [f"w{i}" for i in range(60)]

        for _ in range(10_000):
            a = set(rng.choice(universe, size=rng.integers(1, 25),
                               replace=False))
            b = set(rng.choice(universe, size=rng.integers(1, 25),
                               replace=False))
            wa, wb = WordSet.of("a", a), WordSet.of("b", b)
            inter = len(a & b)
            union = len(a | b)
            j, f = jaccard(wa, wb), rouge1_f1(wa, wb)
            assert j == inter / union
            assert f == 2 * inter / (len(a) + len(b))
            assert abs(j - f / (2 - f)) <= 1e-12
            # exact identity over the rationals
            jf = Fraction(inter, union)
            ff = Fraction(2 * inter, len(a) + len(b))
            assert jf == ff / (2 - ff)

        for trial in range(1_000):
            topics = [WordSet.of(str(i), rng.choice(
                universe, size=rng.integers(3, 15), replace=False))
                for i in range(6)]
            labels = [WordSet.of(f"L{j}", rng.choice(
                universe, size=rng.integers(3, 15), replace=False))
                for j in range(5)]
            for t in topics:
                j_row = [jaccard(t, l) for l in labels]
                f_row = [rouge1_f1(t, l) for l in labels]
                assert int(np.argmax(j_row)) == int(np.argmax(f_row))

        elapsed = time.time() - start
        assert elapsed < 5.0, f"metric oracle suite took {elapsed:.1f}s"
        print(f"PASS: metric oracle suite (jaccard/rouge brute force, "
              f"F1 identity, argmax parity) in {elapsed:.1f}s")


def reference_greedy(values, min_score, labels):
    """Independent greedy: rescan the whole matrix each round."""
    t, l = values.shape
    taken_rows, taken_cols, pairs = set(), set(), {}
    while True:
        best = None
        for i in range(t):
            if i in taken_rows:
                continue
            for j in range(l):
                if j in taken_cols or values[i, j] < min_score:
                    continue
                key = (-values[i, j], i, labels[j])
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            return pairs
        _, i, j = best
        taken_rows.add(i)
        taken_cols.add(j)
        pairs[i] = j


def enumerate_best_total(values, min_score):
    """Max total score over every injective partial matching."""
    t, l = values.shape
    best = 0.0
    for k in range(0, min(t, l) + 1):
        for rows in itertools.combinations(range(t), k):
            for cols in itertools.permutations(range(l), k):
                if all(values[i, j] >= min_score
                       for i, j in zip(rows, cols)):
                    best = max(best, sum(values[i, j]
                                         for i, j in zip(rows, cols)))
    return best


class TestAssignmentCorrectness:
    def test_greedy_matches_reference_and_optimal_is_maximal(self):
        start = time.time()
        rng = np.random.default_rng(7)
        grid = np.linspace(0.0, 1.0, 11)
        checked = 0
        for t in range(1, 7):
            for l in range(1, 7):
                for _ in range(12):
                    values = rng.choice(grid, size=(t, l))
                    m = grid_matrix(values)
                    for min_score in (0.0, 0.3):
                        greedy = transfer_labels(
                            m, strategy="greedy_global",
                            min_score=min_score)
                        expected = reference_greedy(values, min_score,
                                                    m.labels)
                        got = {a.topic_id: m.labels.index(a.label)
                               for a in greedy if a.label is not None}
                        assert got == expected

                        optimal = transfer_labels(m, strategy="optimal",
                                                  min_score=min_score)
                        total = sum(a.score for a in optimal
                                    if a.score is not None)
                        best = enumerate_best_total(values, min_score)
                        assert total == pytest.approx(best, abs=1e-9)
                        greedy_total = sum(a.score for a in greedy
                                           if a.score is not None)
                        assert total >= greedy_total - 1e-9
                        checked += 1
        elapsed = time.time() - start
        assert elapsed < 60.0, f"assignment suite took {elapsed:.1f}s"
        print(f"PASS: assignment correctness ({checked} instances, "
              f"greedy=reference, optimal=enumeration max) in "
              f"{elapsed:.1f}s")


class TestPaperShape:
    def test_22_topics_19_labels(self):
        start = time.time()
        rng = np.random.default_rng(11)
        values = rng.uniform(0.001, 1.0, size=(22, 19))
        m = grid_matrix(values)
        assignments = transfer_labels(m)
        labeled = [a for a in assignments if a.label is not None]
        unlabeled = [a for a in assignments if a.label is None]
        assert len(labeled) == 19
        assert len(unlabeled) == 3
        assert len({a.label for a in labeled}) == 19
        leftovers = unused_labels(assignments, m.labels)
        assert leftovers == []
        elapsed = time.time() - start
        assert elapsed < 1.0
        print(f"PASS: paper-shape reproduction (19 labeled, 3 UNLABELED, "
              f"unused reported) in {elapsed:.2f}s")


class TestPlantedEndToEnd:
    def test_recovers_planted_labels_across_seeds(self, tmp_path):
        start = time.time()
        docs, vocabs = planted_corpus(
            n_topics=6, words_per_topic=50, n_slices=2,
            docs_per_slice=200, tokens_per_doc=60, seed=99)
        speeches = tmp_path / "speeches.jsonl"
        with open(speeches, "w", encoding="utf-8") as fh:
            for d in docs:
                fh.write(json.dumps({
                    "id": d.id, "author": d.author, "slice": d.slice,
                    "text": d.text}) + "\n")
        codebook, true_labels = planted_codebook(vocabs, n_decoys=2,
                                                 seed=99)
        cb_path = tmp_path / "codebook.json"
        cb_path.write_text(json.dumps(codebook), encoding="utf-8")
        vocab_sets = [set(v) for v in vocabs]

        good_seeds = 0
        for seed in range(5):
            config = {
                "preprocess": {"min_term_count": 50, "min_doc_freq": 5},
                "fit": {"k": 6, "iterations": 300, "burn_in": 50,
                        "seed": seed},
                "match": {"cardinality": 20},
            }
            cfg_path = tmp_path / f"config{seed}.json"
            cfg_path.write_text(json.dumps(config), encoding="utf-8")
            project = tmp_path / f"run{seed}"
            for argv in (
                ["--config", str(cfg_path), "ingest", "--project",
                 str(project), "--input", str(speeches)],
                ["--config", str(cfg_path), "preprocess", "--project",
                 str(project)],
                ["--config", str(cfg_path), "fit", "--project",
                 str(project)],
                ["--config", str(cfg_path), "keywords", "--project",
                 str(project), "--codebook", str(cb_path)],
                ["--config", str(cfg_path), "match", "--project",
                 str(project)],
            ):
                assert main(argv) == 0
            payload = json.loads(
                (project / "assignments.json").read_text())
            model = json.loads((project / "model.json").read_text())
            correct = 0
            for entry in payload["assignments"]:
                k = entry["topic"]
                words = set(model["top_words"][0][k][:20]) \
                    | set(model["top_words"][1][k][:20])
                truth = max(range(6),
                            key=lambda i: len(words & vocab_sets[i]))
                if entry["label"] == true_labels[truth]:
                    correct += 1
            if correct >= 5:
                good_seeds += 1
        elapsed = time.time() - start
        assert good_seeds >= 4, f"only {good_seeds}/5 seeds recovered"
        assert elapsed < 300.0, f"end-to-end took {elapsed:.0f}s"
        print(f"PASS: planted-topic end-to-end ({good_seeds}/5 seeds "
              f"recovered >=5/6 labels) in {elapsed:.0f}s")


def pair_counting_kappa(ratings):
    n_items = len(ratings)
    agree = []
    for item in ratings:
        pairs = list(itertools.permutations(item, 2))
        agree.append(sum(1 for a, b in pairs if a == b) / len(pairs))
    p_bar = sum(agree) / n_items
    flat = [r for item in ratings for r in item]
    p_e = sum((flat.count(c) / len(flat)) ** 2 for c in set(flat))
    if p_e >= 1.0:
        return 1.0
    return (p_bar - p_e) / (1 - p_e)


class TestFleissKappa:
    def test_fixtures_monte_carlo_and_exhaustive_oracle(self):
        start = time.time()
        perfect = np.zeros((5, 4), dtype=int)
        for i in range(5):
            perfect[i, i % 4] = 17
        assert fleiss_kappa(perfect) == 1.0

        alternating = np.array([[1, 1], [1, 1]])
        assert fleiss_kappa(alternating) == -1.0

        rng = np.random.default_rng(31)
        values = []
        for _ in range(20):
            counts = np.zeros((100, 4), dtype=int)
            for i in range(100):
                for r in rng.integers(0, 4, size=10):
                    counts[i, r] += 1
            values.append(fleiss_kappa(counts))
        assert abs(float(np.mean(values))) <= 0.05

        for n_items in (1, 2, 3):
            for n_raters in (2, 3):
                for n_cats in (2, 3):
                    for flat in itertools.product(
                            range(n_cats), repeat=n_items * n_raters):
                        ratings = [
                            list(flat[i * n_raters:(i + 1) * n_raters])
                            for i in range(n_items)]
                        counts = np.zeros((n_items, n_cats), dtype=int)
                        for i, item in enumerate(ratings):
                            for r in item:
                                counts[i, r] += 1
                        with warnings.catch_warnings():
                            warnings.simplefilter(
                                "ignore", DegenerateAgreementWarning)
                            got = fleiss_kappa(counts)
                        assert got == pytest.approx(
                            pair_counting_kappa(ratings), abs=1e-12)
        elapsed = time.time() - start
        print(f"PASS: Fleiss' kappa (fixtures exact, Monte-Carlo "
              f"|mean|<=0.05, exhaustive oracle equivalence) in "
              f"{elapsed:.1f}s")


class TestPreprocessingThresholds:
    def test_defaults_exclude_and_filters_are_monotone(self):
        cfg = PreprocessConfig(stopwords=frozenset(),
                               custom_stopwords=frozenset(), stemmer="none")
        assert cfg.min_term_count == 50 and cfg.min_doc_freq == 5

        # 49 occurrences across 10 documents: below the count threshold
        docs = []
        for i in range(10):
            reps = 5 if i < 9 else 4
            docs.append(make_doc(i, " ".join(["sparse"] * reps
                                             + ["common"] * 10)))
        docs += [make_doc(10 + i, " ".join(["common"] * 10))
                 for i in range(5)]
        corpus = build_corpus(docs, cfg)
        assert "sparse" not in corpus.vocabulary.terms
        assert "common" in corpus.vocabulary.terms

        # 100 occurrences in only 4 documents: below the doc threshold
        docs = [make_doc(i, " ".join(["narrow"] * 25 + ["common"] * 15))
                for i in range(4)]
        docs += [make_doc(4 + i, " ".join(["common"] * 15))
                 for i in range(2)]
        corpus = build_corpus(docs, cfg)
        assert "narrow" not in corpus.vocabulary.terms
        assert "common" in corpus.vocabulary.terms

        # vocabulary never grows when thresholds rise
        rng = np.random.default_rng(17)
        docs = [make_doc(i, " ".join(
            f"w{c}" for c in rng.integers(0, 12, size=rng.integers(3, 30))))
            for i in range(25)]

        def vocab(tc, df):
            c = PreprocessConfig(min_term_count=tc, min_doc_freq=df,
                                 stopwords=frozenset(),
                                 custom_stopwords=frozenset(),
                                 stemmer="none")
            return set(build_corpus(docs, c).vocabulary.terms)

        for tc in (1, 2, 4):
            for df in (1, 2, 4):
                base = vocab(tc, df)
                assert vocab(tc + 1, df) <= base
                assert vocab(tc, df + 1) <= base
        print("PASS: preprocessing thresholds (49-count and 4-doc "
              "exclusions at 50/5 defaults, filter monotonicity)")


class TestPipelineDeterminism:
    def test_two_cli_runs_byte_identical(self, tmp_path):
        start = time.time()
        docs, vocabs = planted_corpus(n_topics=4, words_per_topic=20,
                                      n_slices=2, docs_per_slice=50,
                                      tokens_per_doc=30, seed=13)
        speeches = tmp_path / "speeches.jsonl"
        with open(speeches, "w", encoding="utf-8") as fh:
            for d in docs:
                fh.write(json.dumps({
                    "id": d.id, "author": d.author, "slice": d.slice,
                    "text": d.text}) + "\n")
        codebook, _ = planted_codebook(vocabs, n_decoys=1, seed=13)
        cb_path = tmp_path / "codebook.json"
        cb_path.write_text(json.dumps(codebook), encoding="utf-8")
        config = {
            "preprocess": {"min_term_count": 5, "min_doc_freq": 2},
            "fit": {"k": 4, "iterations": 150, "burn_in": 20, "seed": 21},
            "match": {"cardinality": 15},
        }
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config), encoding="utf-8")

        def run(project):
            for argv in (
                ["--config", str(cfg_path), "--workers", "1", "ingest",
                 "--project", str(project), "--input", str(speeches)],
                ["--config", str(cfg_path), "--workers", "1", "preprocess",
                 "--project", str(project)],
                ["--config", str(cfg_path), "fit", "--project",
                 str(project)],
                ["--config", str(cfg_path), "keywords", "--project",
                 str(project), "--codebook", str(cb_path)],
                ["--config", str(cfg_path), "match", "--project",
                 str(project)],
                ["report", "--project", str(project), "--format", "json"],
                ["report", "--project", str(project), "--format", "csv"],
            ):
                assert main(argv) == 0

        run(tmp_path / "a")
        run(tmp_path / "b")
        names = ["documents.json", "corpus.json", "model.json",
                 "keywords.json", "matrix.json", "assignments.json",
                 "project.json", "report.json", "report.csv"]
        for name in names:
            a = (tmp_path / "a" / name).read_bytes()
            b = (tmp_path / "b" / name).read_bytes()
            assert a == b, f"{name} differs between identical runs"
        elapsed = time.time() - start
        print(f"PASS: pipeline determinism (byte-identical artifacts, "
              f"{len(names)} files) in {elapsed:.0f}s")
