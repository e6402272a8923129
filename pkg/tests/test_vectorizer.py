import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviewtox.vectorizer import (
    DocumentTermCounts,
    EmptyCorpusError,
    Vocabulary,
    fit,
    stack,
    tokenize,
    transform,
    transform_many,
)


def brute_force(corpus, doc, min_df):
    """Direct evaluation of tf = f/|d|, idf = ln(N/df), weight = tf * idf."""
    docs = [tokenize(d) for d in corpus]
    terms = sorted({t for d in docs for t in d})
    df = {t: sum(t in d for d in docs) for t in terms}
    vocab = [t for t in terms if df[t] >= min_df]
    toks = tokenize(doc)
    out = {}
    for j, t in enumerate(vocab):
        f = toks.count(t)
        if f and toks:
            w = (f / len(toks)) * math.log(len(docs) / df[t])
            if w:
                out[j] = w
    return vocab, out


def random_corpus(rng):
    alphabet = [f"w{i}" for i in range(rng.randint(1, 8))]
    return [" ".join(rng.choice(alphabet) for _ in range(rng.randint(0, 6)))
            for _ in range(rng.randint(1, 10))]


def test_oracle_1000_corpora():
    rng = random.Random(1234)
    for _ in range(1000):
        corpus = random_corpus(rng)
        min_df = rng.randint(1, 3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            vocab = fit(corpus, min_df)
        for doc in corpus + [random_corpus(rng)[0]]:
            terms, expected = brute_force(corpus, doc, min_df)
            assert list(vocab.terms) == terms
            got = transform(doc, vocab)
            assert list(got.indices) == sorted(expected)
            for j, v in zip(got.indices, got.values):
                assert abs(v - expected[j]) <= 1e-12


def test_tokenize():
    assert tokenize("hello, world. it's fine!! ok?") == ["hello", "world", "it's", "fine", "ok"]
    assert tokenize("... !!") == []


def test_min_df_cutoff():
    corpus = ["a b", "a c", "a b d"]
    vocab = fit(corpus, min_df=2)
    assert vocab.terms == ("a", "b")
    assert list(vocab.df) == [3, 2]
    assert vocab.idf[0] == 0.0
    assert vocab.idf[1] == pytest.approx(math.log(3 / 2))


def test_out_of_vocabulary_tokens_count_in_length():
    vocab = fit(["a b", "b c", "c d"], min_df=2)
    v = transform("b zzz zzz zzz", vocab)
    assert v.values[0] == pytest.approx(0.25 * math.log(3 / 2))


def test_empty_corpus():
    with pytest.raises(EmptyCorpusError):
        fit([])


def test_empty_vocabulary_warns():
    with pytest.warns(UserWarning, match="vocabulary is empty"):
        vocab = fit(["a", "b"], min_df=5)
    assert len(vocab) == 0
    assert transform("a", vocab).dim == 0


def test_profane_dimension():
    vocab = fit(["x y", "x z", "y"], min_df=2)
    v = transform("y y", vocab, profane_count=2)
    assert v.dim == len(vocab) + 1
    dense = v.to_dense()
    assert dense[-1] == 2.0
    assert transform("y", vocab, profane_count=0).dim == len(vocab) + 1
    assert transform("y", vocab).dim == len(vocab)


@pytest.mark.filterwarnings("ignore:no term reaches")
@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.sampled_from("abcdefg"), max_size=7).map(" ".join), min_size=1, max_size=12))
def test_vector_invariants(corpus):
    vocab = fit(corpus, min_df=1)
    for doc in corpus:
        v = transform(doc, vocab, profane_count=1)
        assert np.all(np.diff(v.indices) > 0)
        assert np.all(np.isfinite(v.values)) and np.all(v.values >= 0)
    assert np.all(vocab.df >= vocab.min_df)
    assert np.all(vocab.idf >= 0)


def test_stack_dimension_check():
    vocab = fit(["a", "a b"], min_df=1)
    with pytest.raises(ValueError):
        stack([transform("a", vocab), transform("a", vocab, 1)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.sampled_from(["a", "b", "c", "d", "e", "f."]), max_size=8).map(" ".join),
                min_size=2, max_size=25),
       st.integers(1, 4), st.randoms(use_true_random=False))
def test_cached_counts_match_reference(corpus, min_df, rnd):
    rows = sorted(rnd.sample(range(len(corpus)), rnd.randint(1, len(corpus))))
    others = [i for i in range(len(corpus)) if i not in rows] or rows
    dtc = DocumentTermCounts(corpus)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = fit([corpus[i] for i in rows], min_df)
        fast = dtc.fit_vocabulary(np.array(rows), min_df)
    assert fast == ref
    counts = np.arange(len(others), dtype=float) % 3
    expected = transform_many([corpus[i] for i in others], ref, counts)
    got = dtc.matrix(np.array(others), fast, counts)
    assert got.shape == expected.shape
    assert np.array_equal(got.toarray(), expected.toarray())


def test_vocabulary_equality():
    a = Vocabulary.from_df(["x"], [2], 4, 1)
    assert a == Vocabulary.from_df(["x"], [2], 4, 1)
    assert a != Vocabulary.from_df(["x"], [3], 4, 1)
