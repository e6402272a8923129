"""Small synthetic review-comment corpus for tests, demos and smoke runs.

Every toxic comment carries at least one profanity (sometimes obfuscated) and
no non-toxic comment carries any, so the profane-count feature separates the
classes exactly. Individual profanities are spread thin enough to stay below
the default document-frequency cutoff. The neutral phrases are drawn the same
way for both classes, so keywords and identifiers carry no label signal.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .corpus import Dataset, LabeledComment, load_dataset
from .rng import SplitMix64

BUNDLED_NAME = "synthetic_reviews.csv"

NEUTRAL = (
    "please add a unit test for this branch",
    "this should return early if the list is empty",
    "can we make this method static",
    "nit: trailing whitespace here",
    "looks good to me, thanks for the fix",
    "why not use a switch statement here",
    "the catch block swallows the exception",
    "rename getUserName to fetchUserName for consistency",
    "consider moving parse_config into its own module",
    "see https://docs.example.org/style for the naming rules",
    "this import is unused",
    "we shouldn't log the password here",
    "the default value is wrong for the timeout",
    "could you rebase on master before merging",
    "please split this into two commits",
    "the while loop never terminates when count is zero",
    "typo in the docstring",
    "maybe use a constant instead of the magic number",
    "isValid is never reset after the retry",
    "does this need to be public",
    "let's keep the old behaviour behind a flag",
    "the else branch duplicates the code above",
    "thanks, I'll update the patch tomorrow",
    "this breaks the build on python 2",
)

PROFANE = (
    "crap", "crappy", "shit", "shitty", "damn", "stupid", "idiot", "dumb", "moron",
    "loser", "jerk", "sucks", "hell", "bloody", "bullshit", "fucking", "fuck",
    "asshole", "bastard", "wtf", "sh*t", "f*ck", "b!tch", "stuuupid", "cr@p",
)


def generate(n: int = 200, seed: int = 0) -> Dataset:
    """Balanced corpus of ``n`` comments (``n`` even), deterministic in ``seed``."""
    if n < 2 or n % 2:
        raise ValueError("n must be an even number >= 2")
    g = SplitMix64(seed)
    comments = []
    for i in range(n):
        label = i % 2
        a, b = NEUTRAL[g.below(len(NEUTRAL))], NEUTRAL[g.below(len(NEUTRAL))]
        words = f"{a}. {b}".split()
        if label:
            for _ in range(1 + g.below(2)):
                words.insert(g.below(len(words) + 1), PROFANE[g.below(len(PROFANE))])
        comments.append(LabeledComment(str(i + 1), " ".join(words), label))
    return Dataset(tuple(comments))


def bundled_path() -> Path:
    """Path of the 200-comment corpus shipped with the package."""
    return Path(str(resources.files("reviewtox.data").joinpath(BUNDLED_NAME)))


def load_bundled() -> Dataset:
    return load_dataset(bundled_path())
