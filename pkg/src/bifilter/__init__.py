"""Bitext filtering, sequence alignment, and MT evaluation metrics."""

__version__ = "0.1.0"

from .bisentence_filter import (
    FilterConfig,
    FilterQuality,
    FilterResult,
    align_filter,
    evaluate_filtering,
    load_gold_labels,
    resolve_conflict,
)
from .corpus_io import (
    Bitext,
    CommandProvider,
    Corpus,
    FileProvider,
    VocabStats,
    ensure_translations,
    load_bitext,
    load_corpus,
    save_corpus,
    vocab_stats,
    write_bitext,
)
from .errors import BifilterError, ConfigError, DataError
from .mt_metrics import (
    BleuBreakdown,
    BleuParams,
    MeteorBreakdown,
    TerBreakdown,
    bleu,
    brevity_penalty,
    meteor,
    metric_report,
    ngram_counts,
    nist,
    ter,
)
from .seq_align import (
    AlignConfig,
    Alignment,
    astar_align,
    align_documents,
    chain_scorer,
    equality_scorer,
    lexicon_scorer,
    load_dictionary,
    nw_align,
    threshold_filter,
)
from .similarity import (
    DEFAULT_CHAIN,
    ChainContext,
    ChainDecision,
    ComparatorChain,
    MatchingBlock,
    RatioBreakdown,
    chain_evaluate,
    load_chain_file,
    matching_blocks,
    ratio,
    register_comparator,
    synonym_ratio,
    token_overlap,
)
from .textnorm import (
    StopList,
    Stemmer,
    SynonymLexicon,
    TokenSeq,
    default_stoplist,
    expand_variants,
    remove_stopwords,
    stem,
    tokenize,
)

__all__ = [
    "__version__",
    "BifilterError",
    "ConfigError",
    "DataError",
    "Corpus",
    "Bitext",
    "VocabStats",
    "FileProvider",
    "CommandProvider",
    "load_corpus",
    "save_corpus",
    "load_bitext",
    "ensure_translations",
    "vocab_stats",
    "write_bitext",
    "TokenSeq",
    "StopList",
    "SynonymLexicon",
    "Stemmer",
    "tokenize",
    "remove_stopwords",
    "expand_variants",
    "stem",
    "default_stoplist",
    "MatchingBlock",
    "RatioBreakdown",
    "ComparatorChain",
    "ChainDecision",
    "ChainContext",
    "DEFAULT_CHAIN",
    "matching_blocks",
    "ratio",
    "token_overlap",
    "synonym_ratio",
    "chain_evaluate",
    "load_chain_file",
    "register_comparator",
    "FilterConfig",
    "FilterResult",
    "FilterQuality",
    "align_filter",
    "resolve_conflict",
    "evaluate_filtering",
    "load_gold_labels",
    "Alignment",
    "AlignConfig",
    "lexicon_scorer",
    "chain_scorer",
    "equality_scorer",
    "load_dictionary",
    "nw_align",
    "astar_align",
    "align_documents",
    "threshold_filter",
    "BleuParams",
    "BleuBreakdown",
    "TerBreakdown",
    "MeteorBreakdown",
    "ngram_counts",
    "brevity_penalty",
    "bleu",
    "nist",
    "ter",
    "meteor",
    "metric_report",
]
