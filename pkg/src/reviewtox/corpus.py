"""Labelled comment datasets: loading, writing and stratified fold plans."""

from __future__ import annotations

import csv
import hashlib
import io
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .rng import SplitMix64

DEFAULT_TEXT_COLUMN = "message"
DEFAULT_LABEL_COLUMN = "is_toxic"
DEFAULT_ID_COLUMN = "id"


class DatasetError(Exception):
    """Base class for dataset problems."""


class ColumnError(DatasetError):
    def __init__(self, column: str, available: Sequence[str]):
        super().__init__(f"column {column!r} not found; header has {list(available)}")
        self.column = column


class LabelParseError(DatasetError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: label {value!r} is not 0 or 1")
        self.line = line
        self.value = value


class EmptyDatasetError(DatasetError):
    pass


class StratificationError(DatasetError):
    pass


@dataclass(frozen=True)
class LabeledComment:
    id: str
    text: str
    label: Optional[int] = None

    def __post_init__(self):
        if self.text is None:
            raise ValueError("text must not be None")
        if self.label not in (None, 0, 1):
            raise ValueError(f"label must be 0, 1 or None, got {self.label!r}")


@dataclass(frozen=True)
class Dataset:
    comments: tuple[LabeledComment, ...]
    class_counts: dict = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "comments", tuple(self.comments))
        counts = Counter(c.label for c in self.comments if c.label is not None)
        object.__setattr__(self, "class_counts", {k: counts.get(k, 0) for k in (0, 1)})

    def __len__(self):
        return len(self.comments)

    def __iter__(self):
        return iter(self.comments)

    @property
    def texts(self) -> list[str]:
        return [c.text for c in self.comments]

    @property
    def labels(self) -> list[Optional[int]]:
        return [c.label for c in self.comments]

    @property
    def is_labeled(self) -> bool:
        return all(c.label is not None for c in self.comments)

    def subset(self, indices) -> "Dataset":
        return Dataset(tuple(self.comments[i] for i in indices))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for c in self.comments:
            h.update(f"{c.label}\x1f{c.text}\x1e".encode("utf-8"))
        return h.hexdigest()[:16]

    @classmethod
    def from_texts(cls, texts: Sequence[str], labels: Optional[Sequence[int]] = None) -> "Dataset":
        if labels is None:
            labels = [None] * len(texts)
        if len(labels) != len(texts):
            raise ValueError("texts and labels differ in length")
        return cls(tuple(LabeledComment(str(i), t, None if y is None else int(y))
                         for i, (t, y) in enumerate(zip(texts, labels))))


def _parse_label(raw: str, line: int) -> int:
    v = raw.strip()
    if v in ("0", "1"):
        return int(v)
    raise LabelParseError(line, raw)


def load_dataset(
    path,
    text_column: str = DEFAULT_TEXT_COLUMN,
    label_column: Optional[str] = DEFAULT_LABEL_COLUMN,
    id_column: str = DEFAULT_ID_COLUMN,
    require_labels: bool = True,
) -> Dataset:
    """Read a comma-separated file with a header row.

    A leading byte-order mark is stripped. If the label column is missing and
    ``require_labels`` is false the comments are returned unlabelled. When the
    file has no ``id`` column, the 1-based data row number is used.
    """
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if text_column not in header:
            raise ColumnError(text_column, header)
        ti = header.index(text_column)
        li = None
        if label_column is not None and label_column in header:
            li = header.index(label_column)
        elif require_labels:
            raise ColumnError(label_column, header)
        ii = header.index(id_column) if id_column in header else None

        comments = []
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if ti >= len(row) or (li is not None and li >= len(row)):
                raise DatasetError(f"line {line}: expected {len(header)} fields, got {len(row)}")
            label = _parse_label(row[li], line) if li is not None else None
            cid = row[ii] if ii is not None and ii < len(row) else str(len(comments) + 1)
            comments.append(LabeledComment(cid, row[ti], label))
    if not comments:
        raise EmptyDatasetError(f"{path}: no data rows")
    return Dataset(tuple(comments))


def write_dataset(
    ds: Dataset,
    path,
    text_column: str = DEFAULT_TEXT_COLUMN,
    label_column: str = DEFAULT_LABEL_COLUMN,
    id_column: str = DEFAULT_ID_COLUMN,
) -> None:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([id_column, text_column, label_column])
    for c in ds:
        w.writerow([c.id, c.text, "" if c.label is None else c.label])
    atomic_write_text(path, buf.getvalue())


def atomic_write_bytes(path, data: bytes) -> None:
    """Write via a temporary sibling file and rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: tuple[int, ...]
    seed: int

    def fold_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignments) if f == fold]


def stratified_folds(ds: Dataset, k: int = 10, seed: int = 0) -> FoldPlan:
    """Assign every comment to one of ``k`` folds, preserving the class ratio.

    Each class's indices are shuffled with :class:`SplitMix64` (Fisher-Yates)
    and dealt round-robin; the dealing position carries over from one class to
    the next so fold sizes also stay within one of each other.
    """
    if k < 2:
        raise StratificationError(f"k must be at least 2, got {k}")
    if not ds.is_labeled:
        raise StratificationError("stratification needs a label on every comment")
    for label, n in ds.class_counts.items():
        if 0 < n < k:
            raise StratificationError(f"class {label} has {n} members, fewer than k={k}")
    rng = SplitMix64(seed)
    assignments = [-1] * len(ds)
    pos = 0
    for label in (0, 1):
        members = [i for i, c in enumerate(ds.comments) if c.label == label]
        rng.shuffle(members)
        for idx in members:
            assignments[idx] = pos % k
            pos += 1
    return FoldPlan(k, tuple(assignments), seed)


def split_train_test(ds: Dataset, plan: FoldPlan, test_fold: int) -> tuple[Dataset, Dataset]:
    if not 0 <= test_fold < plan.k:
        raise IndexError(f"fold {test_fold} out of range [0, {plan.k})")
    if len(plan.assignments) != len(ds):
        raise ValueError("fold plan does not match dataset size")
    train = [c for c, f in zip(ds.comments, plan.assignments) if f != test_fold]
    test = [c for c, f in zip(ds.comments, plan.assignments) if f == test_fold]
    return Dataset(tuple(train)), Dataset(tuple(test))
