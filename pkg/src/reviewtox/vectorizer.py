"""TF-IDF term space.

Weights follow the textbook definitions with no smoothing and no length
normalisation::

    tf(w, d)    = f(w, d) / sum_t f(t, d)
    idf(w)      = ln(N / df(w))
    tfidf(w, d) = tf(w, d) * idf(w)

Out-of-vocabulary tokens still count in the ``sum_t f(t, d)`` denominator.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

DEFAULT_MIN_DF = 20
_EDGE_PUNCT = ".,!?'"


class EmptyCorpusError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Whitespace split, trimming sentence punctuation from each token's ends."""
    out = []
    for tok in text.split():
        tok = tok.strip(_EDGE_PUNCT)
        if tok:
            out.append(tok)
    return out


@dataclass(frozen=True, eq=False)
class Vocabulary:
    terms: tuple[str, ...]
    df: np.ndarray
    idf: np.ndarray
    n_docs: int
    min_df: int
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self.terms == other.terms and self.n_docs == other.n_docs
                and self.min_df == other.min_df and np.array_equal(self.df, other.df)
                and np.array_equal(self.idf, other.idf))

    __hash__ = object.__hash__

    @classmethod
    def from_df(cls, terms: Sequence[str], df: Sequence[int], n_docs: int, min_df: int) -> "Vocabulary":
        df = np.asarray(df, dtype=np.int64)
        idf = np.array([math.log(n_docs / d) for d in df.tolist()], dtype=np.float64)
        return cls(tuple(terms), df, idf, int(n_docs), int(min_df))


@dataclass(frozen=True, eq=False)
class FeatureVector:
    indices: np.ndarray
    values: np.ndarray
    dim: int
    profane_count: Optional[float] = None

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.values
        return out


def fit(corpus: Sequence[str], min_df: int = DEFAULT_MIN_DF) -> Vocabulary:
    """Build a vocabulary of tokens occurring in at least ``min_df`` documents.

    Terms are kept in sorted order.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot fit a vocabulary on an empty corpus")
    counts: Counter = Counter()
    for doc in corpus:
        counts.update(set(tokenize(doc)))
    kept = sorted(t for t, d in counts.items() if d >= min_df)
    if not kept:
        warnings.warn(f"no term reaches min_df={min_df} in {len(corpus)} documents; vocabulary is empty")
    return Vocabulary.from_df(kept, [counts[t] for t in kept], len(corpus), min_df)


def transform(text: str, vocab: Vocabulary, profane_count: Optional[float] = None) -> FeatureVector:
    tokens = tokenize(text)
    total = len(tokens)
    dim = len(vocab) + (1 if profane_count is not None else 0)
    idx: list[int] = []
    vals: list[float] = []
    if total:
        for term, f in Counter(tokens).items():
            j = vocab.index.get(term)
            if j is None:
                continue
            w = (f / total) * vocab.idf[j]
            if w != 0.0:
                idx.append(j)
                vals.append(w)
    order = np.argsort(idx, kind="stable") if idx else np.empty(0, dtype=np.int64)
    indices = np.asarray(idx, dtype=np.int64)[order]
    values = np.asarray(vals, dtype=np.float64)[order]
    if profane_count is not None and profane_count != 0:
        indices = np.append(indices, len(vocab))
        values = np.append(values, float(profane_count))
    return FeatureVector(indices, values, dim, None if profane_count is None else float(profane_count))


def stack(vectors: Iterable[FeatureVector], dim: Optional[int] = None) -> sp.csr_matrix:
    vectors = list(vectors)
    if dim is None:
        if not vectors:
            raise ValueError("cannot infer dimension of an empty batch")
        dim = vectors[0].dim
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        if v.dim != dim:
            raise ValueError(f"vector {i} has dimension {v.dim}, expected {dim}")
        indptr[i + 1] = indptr[i] + len(v.indices)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.empty(0, np.int64)
    data = np.concatenate([v.values for v in vectors]) if vectors else np.empty(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def transform_many(texts: Sequence[str], vocab: Vocabulary,
                   profane_counts: Optional[Sequence[float]] = None) -> sp.csr_matrix:
    if profane_counts is None:
        vecs = [transform(t, vocab) for t in texts]
        return stack(vecs, len(vocab))
    vecs = [transform(t, vocab, c) for t, c in zip(texts, profane_counts)]
    return stack(vecs, len(vocab) + 1)


class DocumentTermCounts:
    """Token counts for a fixed document collection, tokenized once.

    Cross-validation refits the vocabulary on every training partition; doing
    that from a cached count matrix avoids re-tokenizing 50 times. Results are
    identical to :func:`fit` / :func:`transform_many` on the same rows.
    """

    def __init__(self, texts: Sequence[str]):
        docs = [Counter(tokenize(t)) for t in texts]
        self.terms = sorted({term for d in docs for term in d})
        col = {t: i for i, t in enumerate(self.terms)}
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for d in docs:
            for term in sorted(d, key=col.__getitem__):
                indices.append(col[term])
                data.append(d[term])
            indptr.append(len(indices))
        self.counts = sp.csr_matrix(
            (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
             np.asarray(indptr, dtype=np.int64)),
            shape=(len(docs), len(self.terms)),
        )
        self.totals = np.asarray(self.counts.sum(axis=1)).ravel()

    def fit_vocabulary(self, rows: np.ndarray, min_df: int = DEFAULT_MIN_DF) -> Vocabulary:
        rows = np.asarray(rows)
        if rows.size == 0:
            raise EmptyCorpusError("cannot fit a vocabulary on an empty corpus")
        sub = self.counts[rows]
        df = np.bincount(sub.indices, minlength=len(self.terms))
        keep = np.flatnonzero(df >= min_df)
        if keep.size == 0:
            warnings.warn(f"no term reaches min_df={min_df} in {rows.size} documents; vocabulary is empty")
        return Vocabulary.from_df([self.terms[i] for i in keep], df[keep], rows.size, min_df)

    def matrix(self, rows: np.ndarray, vocab: Vocabulary,
               profane_counts: Optional[np.ndarray] = None) -> sp.csr_matrix:
        """TF-IDF rows for ``rows``; ``profane_counts`` is indexed like ``rows``."""
        rows = np.asarray(rows)
        colmap = np.full(len(self.terms), -1, dtype=np.int64)
        glob = {t: i for i, t in enumerate(self.terms)}
        for j, t in enumerate(vocab.terms):
            g = glob.get(t)
            if g is not None:
                colmap[g] = j
        sub = self.counts[rows].tocoo()
        cols = colmap[sub.col]
        keep = cols >= 0
        r, c, f = sub.row[keep], cols[keep], sub.data[keep]
        w = (f / self.totals[rows][r]) * vocab.idf[c]
        nz = w != 0.0
        r, c, w = r[nz], c[nz], w[nz]
        dim = len(vocab)
        if profane_counts is not None:
            pc = np.asarray(profane_counts, dtype=np.float64)
            pr = np.flatnonzero(pc != 0)
            r = np.concatenate([r, pr])
            c = np.concatenate([c, np.full(pr.size, dim, dtype=np.int64)])
            w = np.concatenate([w, pc[pr]])
            dim += 1
        out = sp.csr_matrix((w, (r, c)), shape=(rows.size, dim))
        out.sort_indices()
        return out
