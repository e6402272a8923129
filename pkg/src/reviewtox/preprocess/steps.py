"""Text normalisation steps for code review comments.

Every step is a pure ``str -> str`` function. Matching uses alphanumeric
boundaries (underscore counts as a separator) so that a later step turning
``_`` into a space never exposes a new match to an earlier one.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

from .lexicon import LexiconSet, default_lexicon

# not preceded / followed by a letter or digit
_NB = r"(?<![^\W_])"
_NA = r"(?![^\W_])"

URL_PATTERN = re.compile(_NB + r"(?:(?:https?|ftp)://|www\.)\S+", re.IGNORECASE)
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'", "`": "'"})
_SYMBOL = re.compile(r"[^\w\s.,!?']|_")
_PUNCT_RUN = re.compile(r"([^\w\s])\1{2,}")
_LETTER_TOKEN = re.compile(r"[^\W\d_]+")
_TRIPLE = re.compile(r"(.)\1\1")
_CAMEL = re.compile(r"(?<=[a-z])(?=[A-Z])")
# Beyond this many repeated runs in one word, skip the candidate search.
_MAX_VARIABLE_RUNS = 10

RETAINED_PUNCTUATION = ".,!?'"


@dataclass(frozen=True)
class PreprocessConfig:
    split_identifiers: bool = False
    remove_keywords: bool = False
    count_profanity: bool = False

    @classmethod
    def all_combinations(cls) -> list["PreprocessConfig"]:
        return [cls(s, k, p) for s, k, p in itertools.product((False, True), repeat=3)]

    def label(self) -> str:
        on = [n for n, f in (("split", self.split_identifiers), ("keyword", self.remove_keywords),
                             ("profanity", self.count_profanity)) if f]
        return "+".join(on) or "base"


def remove_urls(text: str) -> str:
    return URL_PATTERN.sub("", text)


@lru_cache(maxsize=8)
def _word_regex(words: tuple[str, ...], flags: int = re.IGNORECASE) -> re.Pattern:
    alternation = "|".join(re.escape(w) for w in sorted(words, key=lambda w: (-len(w), w)))
    return re.compile(rf"(?<![^\W_'])(?:{alternation})(?![^\W_'])", flags)


def expand_contractions(text: str, lexicon: LexiconSet | None = None) -> str:
    lex = lexicon or default_lexicon()
    table = lex.contractions
    pattern = _word_regex(tuple(table))

    def repl(m: re.Match) -> str:
        found = m.group(0)
        out = table[found.lower()]
        return out[0].upper() + out[1:] if found[0].isupper() else out

    return pattern.sub(repl, text.translate(_APOSTROPHES))


def normalize_adversarial(text: str, lexicon: LexiconSet | None = None) -> str:
    """Rewrite masked profanity ("sh*t", "b!tch") and slang acronyms in full."""
    lex = lexicon or default_lexicon()
    if lex.acronyms:
        acr = lex.acronyms
        text = _word_regex(tuple(acr)).sub(lambda m: acr[m.group(0).lower()], text)

    words = lex.profanities_by_length

    def repl(m: re.Match) -> str:
        span = m.group(0)
        if span.isalpha():
            return span
        for i, w in enumerate(words):
            if m.group(f"w{i}") is not None:
                return w + m.group("suffix")
        return span  # pragma: no cover

    return lex.profanity_patterns.sub(repl, text)


def _collapse_word(word: str, known: frozenset[str], dictionary: frozenset[str]) -> str:
    runs = [(ch, len(list(g))) for ch, g in itertools.groupby(word)]
    variable = [i for i, (_, n) in enumerate(runs) if n >= 2]
    fallback = "".join(ch * (min(n, 2)) for ch, n in runs)
    if len(variable) > _MAX_VARIABLE_RUNS:
        return fallback

    candidates = []
    for choice in itertools.product((1, 2), repeat=len(variable)):
        lengths = dict(zip(variable, choice))
        cand = "".join(ch * lengths.get(i, n) for i, (ch, n) in enumerate(runs))
        candidates.append(cand)
    candidates.sort(key=lambda c: (len(c), c))
    for vocab in (known, dictionary):
        for cand in candidates:
            if cand.lower() in vocab:
                return cand
    return fallback


def collapse_repetitions(text: str, lexicon: LexiconSet | None = None) -> str:
    """Shrink character floods.

    Punctuation runs of three or more become two ("..." -> ".."). A word with a
    letter run of three or more is reduced to the shortest spelling, taking each
    repeated run down to one or two letters, that is a known profanity or
    dictionary word ("duumbbbb" -> "dumb"); failing that, runs are capped at two.
    """
    lex = lexicon or default_lexicon()
    text = _PUNCT_RUN.sub(r"\1\1", text)

    def repl(m: re.Match) -> str:
        word = m.group(0)
        if not _TRIPLE.search(word):
            return word
        return _collapse_word(word, lex.profanity_set, lex.dictionary)

    return _LETTER_TOKEN.sub(repl, text)


def remove_symbols(text: str) -> str:
    # one space per removed character; whitespace is collapsed later
    return _SYMBOL.sub(" ", text)


def split_identifiers(text: str) -> str:
    return _CAMEL.sub(" ", text).replace("_", " ")


def remove_keywords(text: str, lexicon: LexiconSet | None = None) -> str:
    lex = lexicon or default_lexicon()
    return _word_regex(lex.keywords, 0).sub(" ", text)


def count_profanities(text: str, lexicon: LexiconSet | None = None) -> int:
    lex = lexicon or default_lexicon()
    return len(_word_regex(lex.profanities).findall(text))


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def run_pipeline(
    text: str,
    cfg: PreprocessConfig = PreprocessConfig(),
    lexicon: LexiconSet | None = None,
) -> tuple[str, int | None]:
    """Apply the full normalisation chain to one comment.

    Order: URL removal, identifier splitting (if enabled; it needs the original
    casing), lowercasing, contraction expansion, adversarial-pattern
    normalisation, repetition elimination, symbol removal, keyword removal (if
    enabled), whitespace collapse.

    Returns
    -------
    (text, count)
        ``count`` is the number of profane words in the output text when
        ``cfg.count_profanity`` is set, otherwise ``None``.
    """
    lex = lexicon or default_lexicon()
    text = remove_urls(text)
    if cfg.split_identifiers:
        text = split_identifiers(text)
    text = text.lower()
    text = expand_contractions(text, lex)
    text = normalize_adversarial(text, lex)
    text = collapse_repetitions(text, lex)
    text = remove_symbols(text)
    if cfg.remove_keywords:
        text = remove_keywords(text, lex)
    text = collapse_whitespace(text)
    count = count_profanities(text, lex) if cfg.count_profanity else None
    return text, count


def preprocess_many(texts, cfg: PreprocessConfig = PreprocessConfig(), lexicon: LexiconSet | None = None):
    """Run the pipeline over a sequence; returns (texts, counts or None)."""
    lex = lexicon or default_lexicon()
    out, counts = [], []
    for t in texts:
        p, c = run_pipeline(t, cfg, lex)
        out.append(p)
        counts.append(c)
    return out, (counts if cfg.count_profanity else None)
