"""Bundled word lists used by the preprocessing steps."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

N_CONTRACTIONS = 153
N_PROFANITIES = 85
N_KEYWORDS = 90

# Characters a person may type in place of a letter to dodge a word filter.
_GENERIC_MASK = "*#%"
_LETTER_MASKS = {
    "a": "@4",
    "e": "3",
    "i": "!1",
    "l": "1",
    "o": "0",
    "s": "$5",
}
# Symbols that may be wedged between two letters ("shi*tty").
_INSERTABLE = "*#@$%!"


class LexiconError(ValueError):
    """A bundled or user-supplied word list is malformed."""


def _read_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def _obfuscation_pattern(word: str) -> str:
    # First letter stays literal; later letters may be masked; symbols may be
    # inserted between letters. A trailing run of letters (suffix) is allowed.
    parts = [re.escape(word[0])]
    for ch in word[1:]:
        masks = _GENERIC_MASK + _LETTER_MASKS.get(ch, "")
        parts.append(f"[{re.escape(_INSERTABLE)}]*")
        parts.append(f"[{re.escape(ch + masks)}]")
    return "".join(parts)


@dataclass(frozen=True, eq=False)
class LexiconSet:
    contractions: dict[str, str]
    profanities: tuple[str, ...]
    keywords: tuple[str, ...]
    acronyms: dict[str, str] = field(default_factory=dict)
    dictionary: frozenset[str] = frozenset()
    check_sizes: bool = True

    def __post_init__(self):
        expected = (
            ("contractions", len(self.contractions), N_CONTRACTIONS),
            ("profanities", len(self.profanities), N_PROFANITIES),
            ("keywords", len(self.keywords), N_KEYWORDS),
        )
        if self.check_sizes:
            for name, got, want in expected:
                if got != want:
                    raise LexiconError(f"{name}: expected {want} entries, found {got}")
        for name, entries in (
            ("contractions", list(self.contractions)),
            ("profanities", list(self.profanities)),
            ("keywords", list(self.keywords)),
        ):
            if len(set(entries)) != len(entries):
                raise LexiconError(f"{name}: duplicate entries")
            bad = [e for e in entries if e != e.lower()]
            if bad:
                raise LexiconError(f"{name}: entries must be lowercase: {bad[:3]}")

    @property
    def profanity_set(self) -> frozenset[str]:
        return _profanity_set(self)

    @property
    def profanities_by_length(self) -> tuple[str, ...]:
        return tuple(sorted(self.profanities, key=lambda w: (-len(w), w)))

    @property
    def profanity_patterns(self) -> re.Pattern:
        """One alternation matching obfuscated spellings of every profane word.

        Longer words are tried first so ``fucker`` wins over ``fuck``. Group
        ``w<i>`` matches the i-th word of :attr:`profanities_by_length`;
        ``suffix`` holds any letters following it ("f*cking").
        """
        return _profanity_regex(self)


@lru_cache(maxsize=8)
def _profanity_set(lex: LexiconSet) -> frozenset[str]:
    return frozenset(lex.profanities)


@lru_cache(maxsize=8)
def _profanity_regex(lex: LexiconSet) -> re.Pattern:
    words = lex.profanities_by_length
    alternation = "|".join(f"(?P<w{i}>{_obfuscation_pattern(w)})" for i, w in enumerate(words))
    return re.compile(rf"(?<![^\W_])(?:{alternation})(?P<suffix>[a-z]*)(?![^\W_])", re.IGNORECASE)


def _data(name: str) -> str:
    return resources.files("reviewtox.preprocess").joinpath("data", name).read_text(encoding="utf-8")


def _parse_pairs(text: str, name: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for ln in _read_lines(text):
        key, sep, value = ln.partition("\t")
        if not sep:
            raise LexiconError(f"{name}: expected 'key<TAB>value', got {ln!r}")
        if key in out:
            raise LexiconError(f"{name}: duplicate key {key!r}")
        out[key] = value
    return out


@lru_cache(maxsize=1)
def default_lexicon() -> LexiconSet:
    """Load the versioned word lists shipped with the package."""
    return LexiconSet(
        contractions=_parse_pairs(_data("contractions.tsv"), "contractions"),
        profanities=tuple(_read_lines(_data("profanities.txt"))),
        keywords=tuple(_read_lines(_data("keywords.txt"))),
        acronyms=_parse_pairs(_data("acronyms.tsv"), "acronyms"),
        dictionary=frozenset(_read_lines(_data("dictionary.txt"))),
    )
