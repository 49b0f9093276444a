"""lexshift: quantify diachronic lexical semantic change in year-tagged corpora.

Indices: collocate valence and arousal (affect norms), embedding breadth,
intensifier share, theme share, and salience; trends are tested with OLS,
a permutation Durbin-Watson diagnostic, an AR(1) GLS fallback, and HC3
standardized coefficients.
"""

__version__ = "0.1.0"

from .collocates import AnnualCollocateCounts, annual_collocate_counts, extract_collocates, top_k
from .indices import (
    IndexPoint,
    IndexSeries,
    intensifier_index,
    salience,
    theme_index,
    weighted_norm_index,
)
from .ingest import (
    CleaningRuleSet,
    Document,
    LemmaSentence,
    ParsedDocument,
    ParsedToken,
    clean_text,
    fuse_targets,
    load_conllu,
    load_lemma_corpus,
    load_raw_corpus,
)
from .lexicon import (
    AffectNorms,
    IntensifierSet,
    ThemeDictionary,
    coverage,
    load_intensifiers,
    load_norms,
    load_stopwords,
    load_theme_dictionary,
)
from .breadth import Intervals, breadth_series, mean_pairwise_distance, sample_sentences
from .embedding import (
    EmbeddingSession,
    FileEmbeddingProvider,
    HttpEmbeddingProvider,
    StubEmbeddingProvider,
)
from .trend import TrendFit, durbin_watson, fit_trend, gls_ar1_fit, hc3_standardized, ols_fit
from .pipeline import AnalysisConfig, load_config, run_pipeline
