"""Topic models and diachronic analytics for dated text corpora."""

from .corpus import (
    DocTermMatrix,
    LexiconLemmatizer,
    NormalizerConfig,
    RawDocument,
    Vocabulary,
    build_matrix,
    fetch_corpus,
    load_local_corpus,
    normalize,
)
from .align import AlignedOverlay, ExternalSeries, align, load_series
from .divergence import JsdSeries, YearlyTopicSeries, jsd, jsd_series, kl_divergence, yearly_distributions
from .lda import LdaConfig, fit_lda
from .nmf import NmfConfig, NmfModel, doc_topic_proportions, fit_nmf, fit_nmf_model
from .semmap import classical_mds, cosine_distance_matrix, place_labels, representative_docs
from .topicmodel import TopicModel, perplexity, top_words
from .trends import TrendResult, analyze_trends, classify, ols_trend, topic_prevalence_series

__version__ = "0.1.0"
