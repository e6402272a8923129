from .lexicon import LexiconError, LexiconSet, default_lexicon
from .steps import (
    PreprocessConfig,
    collapse_repetitions,
    collapse_whitespace,
    count_profanities,
    expand_contractions,
    normalize_adversarial,
    preprocess_many,
    remove_keywords,
    remove_symbols,
    remove_urls,
    run_pipeline,
    split_identifiers,
)

__all__ = [
    "LexiconError",
    "LexiconSet",
    "PreprocessConfig",
    "collapse_repetitions",
    "collapse_whitespace",
    "count_profanities",
    "default_lexicon",
    "expand_contractions",
    "normalize_adversarial",
    "preprocess_many",
    "remove_keywords",
    "remove_symbols",
    "remove_urls",
    "run_pipeline",
    "split_identifiers",
]
