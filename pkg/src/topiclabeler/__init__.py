"""Time-sliced topic estimation with codebook-driven label transfer."""

from ._porter import porter_stem
from .codebook import (Codebook, CodebookEntry, KeywordList, Subtopic,
                       concat_major_topics, parse_codebook, tfidf_keywords)
from .corpus import (Corpus, CorpusVectorizer, Document, EmptyCorpusError,
                     IngestError, PreprocessConfig, Vocabulary, aggregate,
                     build_corpus, default_custom_stopwords,
                     default_stopwords, ingest, tokenize_and_normalize)
from .labeling import (LabelAssignment, SimilarityMatrix, WordSet,
                       apply_overrides, jaccard, rouge1_f1,
                       similarity_matrix, transfer_labels, unused_labels)
from .topics import (FitConfig, ModelMetrics, SlicedGibbsLda, TopicModel,
                     coherence, compute_metrics, exclusivity, fit,
                     pooled_top_words, select_k, top_words, umass_score)
from .validation import (AgreementReport, AnnotationRecord,
                         agreement_proportions, build_report, fleiss_kappa,
                         modal_labels, parse_annotations, per_topic_kappa)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport", "AnnotationRecord", "Codebook", "CodebookEntry",
    "Corpus", "CorpusVectorizer", "Document", "EmptyCorpusError",
    "FitConfig", "IngestError", "KeywordList", "LabelAssignment",
    "ModelMetrics", "PreprocessConfig", "SimilarityMatrix",
    "SlicedGibbsLda", "Subtopic", "TopicModel", "Vocabulary", "WordSet",
    "aggregate", "agreement_proportions", "apply_overrides",
    "build_corpus", "build_report", "coherence", "compute_metrics",
    "concat_major_topics", "default_custom_stopwords", "default_stopwords",
    "exclusivity", "fit", "fleiss_kappa", "ingest", "jaccard",
    "modal_labels", "parse_annotations", "parse_codebook",
    "per_topic_kappa", "pooled_top_words", "porter_stem", "rouge1_f1",
    "select_k", "similarity_matrix", "tfidf_keywords",
    "tokenize_and_normalize", "top_words", "transfer_labels",
    "umass_score", "unused_labels",
]
