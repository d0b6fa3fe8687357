"""Labeled tweet corpora: domain types, TSV persistence, stratified
splitting, and annotator-agreement statistics.

All types are immutable after construction and safe to share across
threads; every operation here is a pure function (split randomness is
fully determined by the seed argument).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import DataError
from .rng import SplitMix64, derive_seed


class Label(Enum):
    """The three annotation categories, in fixed class order."""

    DEFECT = "defect"
    POSSIBLE_DEFECT = "possible_defect"
    NON_DEFECT = "non_defect"

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown label {text!r}") from None


LABELS: tuple[Label, ...] = tuple(Label)
_LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}


def label_index(label: Label) -> int:
    """Position of `label` in the fixed class order (used for tie-breaks)."""
    return _LABEL_INDEX[label]


def _is_utf8_boundary(raw: bytes, offset: int) -> bool:
    return offset == len(raw) or (raw[offset] & 0xC0) != 0x80


def byte_span_to_chars(text: str, span: tuple[int, int]) -> tuple[int, int]:
    """Convert a UTF-8 byte span to character offsets, validating bounds.

    Raises ValueError when the span is empty, out of range, or cuts a
    multi-byte character.
    """
    raw = text.encode("utf-8")
    start, end = span
    if not (0 <= start < end <= len(raw)):
        raise ValueError(f"invalid span {span!r} for text of {len(raw)} bytes")
    if not (_is_utf8_boundary(raw, start) and _is_utf8_boundary(raw, end)):
        raise ValueError(f"span {span!r} does not fall on character boundaries")
    return len(raw[:start].decode("utf-8")), len(raw[:end].decode("utf-8"))


def char_span_to_bytes(text: str, span: tuple[int, int]) -> tuple[int, int]:
    """Convert character offsets into `text` to UTF-8 byte offsets."""
    start, end = span
    return len(text[:start].encode("utf-8")), len(text[:end].encode("utf-8"))


@dataclass(frozen=True)
class Tweet:
    """One raw short text; `text` is kept byte-for-byte as retrieved."""

    id: str
    user_id: str
    text: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("tweet id must be non-empty")


@dataclass(frozen=True)
class AnnotatedTweet:
    """A tweet with its assigned label and, optionally, the matched span.

    The span is a (start, end) pair of UTF-8 byte offsets into the raw
    text, validated to land on character boundaries.
    """

    tweet: Tweet
    label: Label
    match_span: tuple[int, int] | None = None

    def __post_init__(self):
        if self.match_span is not None:
            byte_span_to_chars(self.tweet.text, self.match_span)


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of annotated tweets with unique ids."""

    items: tuple[AnnotatedTweet, ...]
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        seen: set[str] = set()
        for item in self.items:
            tid = item.tweet.id
            if tid in seen:
                raise DataError(f"duplicate tweet id {tid!r}")
            seen.add(tid)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[AnnotatedTweet]:
        return iter(self.items)

    def labels(self) -> list[Label]:
        return [item.label for item in self.items]

    def tweets(self) -> list[Tweet]:
        return [item.tweet for item in self.items]

    def class_counts(self) -> Counter:
        return Counter(item.label for item in self.items)

    def subset(self, indices: Iterable[int], provenance: str | None = None) -> "Corpus":
        items = tuple(self.items[i] for i in indices)
        return Corpus(items, self.provenance if provenance is None else provenance)


@dataclass(frozen=True)
class SplitResult:
    """Three-way partition of a corpus plus the seed that produced it."""

    train: Corpus
    validation: Corpus
    test: Corpus
    seed: int


@dataclass(frozen=True)
class ClassDistribution:
    counts: dict[Label, int]
    proportions: dict[Label, float]
    total: int


TSV_HEADER = ("id", "user_id", "label", "text", "span_start", "span_end")


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


_UNESCAPE = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _unescape(text: str) -> str:
    if "\\" not in text:
        return text
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _UNESCAPE:
                raise ValueError(f"bad escape sequence at position {i}")
            out.append(_UNESCAPE[text[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def load_corpus(path: str | Path, format: str = "tsv") -> Corpus:
    """Read a corpus file (see `TSV_HEADER` for the column layout).

    Span columns may be empty; when present they must form a valid byte
    span of the (unescaped) text.  Errors name the offending line.
    """
    if format != "tsv":
        raise ValueError(f"unknown corpus format {format!r}")
    path = Path(path)
    # split on newline only: escaped text may contain other control
    # characters that str.splitlines() would treat as row boundaries
    lines = path.read_text(encoding="utf-8").split("\n")
    if not lines or tuple(lines[0].split("\t")) != TSV_HEADER:
        raise DataError(f"{path}: missing or malformed header line")
    items: list[AnnotatedTweet] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != len(TSV_HEADER):
            raise DataError(
                f"{path}: expected {len(TSV_HEADER)} columns at line {lineno}, got {len(fields)}"
            )
        tid, user_id, label_s, text_s, start_s, end_s = fields
        if tid in seen:
            raise DataError(f"{path}: duplicate tweet id {tid!r} at line {lineno}")
        seen.add(tid)
        try:
            label = Label.parse(label_s)
        except ValueError:
            raise DataError(f"{path}: unknown label {label_s!r} at line {lineno}") from None
        try:
            text = _unescape(text_s)
        except ValueError as exc:
            raise DataError(f"{path}: {exc} at line {lineno}") from None
        if (start_s == "") != (end_s == ""):
            raise DataError(f"{path}: half-empty span at line {lineno}")
        span: tuple[int, int] | None = None
        if start_s:
            try:
                span = (int(start_s), int(end_s))
            except ValueError:
                raise DataError(f"{path}: non-integer span at line {lineno}") from None
        try:
            items.append(AnnotatedTweet(Tweet(tid, user_id, text), label, span))
        except ValueError as exc:
            raise DataError(f"{path}: {exc} at line {lineno}") from None
    return Corpus(tuple(items), provenance=str(path))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    rows = ["\t".join(TSV_HEADER)]
    for item in corpus:
        span = item.match_span
        rows.append(
            "\t".join(
                (
                    item.tweet.id,
                    item.tweet.user_id,
                    item.label.value,
                    _escape(item.tweet.text),
                    "" if span is None else str(span[0]),
                    "" if span is None else str(span[1]),
                )
            )
        )
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def class_distribution(corpus: Corpus) -> ClassDistribution:
    """Per-class counts and unrounded proportions (zeros on an empty corpus)."""
    counts = {label: 0 for label in LABELS}
    counts.update(corpus.class_counts())
    total = len(corpus)
    proportions = {
        label: (counts[label] / total if total else 0.0) for label in LABELS
    }
    return ClassDistribution(counts, proportions, total)


def stratified_split(
    corpus: Corpus, holdout_fraction: float, seed: int
) -> tuple[Corpus, Corpus]:
    """Split off a stratified holdout; returns (remainder, holdout).

    Per class with N items the holdout receives exactly ceil(f * N) items,
    chosen by a seeded SplitMix64 shuffle of that class.  The fraction is
    interpreted at its decimal spelling (``Fraction(str(f))``) so that the
    ceiling is computed exactly rather than on binary float products.
    Both parts preserve the input's item order.
    """
    if not (0.0 < holdout_fraction < 1.0):
        raise ValueError("holdout_fraction must be in (0, 1)")
    frac = Fraction(str(holdout_fraction))
    by_label: dict[Label, list[int]] = {}
    for i, item in enumerate(corpus):
        by_label.setdefault(item.label, []).append(i)
    rng = SplitMix64(seed)
    holdout_ids: set[int] = set()
    for label in LABELS:
        indices = by_label.get(label)
        if not indices:
            continue
        take = math.ceil(frac * len(indices))
        pool = list(indices)
        rng.shuffle(pool)
        holdout_ids.update(pool[:take])
    remainder = corpus.subset(i for i in range(len(corpus)) if i not in holdout_ids)
    holdout = corpus.subset(i for i in range(len(corpus)) if i in holdout_ids)
    return remainder, holdout


def three_way_split(
    corpus: Corpus, test_fraction: float, validation_fraction: float, seed: int
) -> SplitResult:
    """Carve off a test set, then a validation set from the remainder.

    Stage one uses `seed` directly; stage two uses `derive_seed(seed, 1)`.
    """
    remainder, test = stratified_split(corpus, test_fraction, seed)
    train, validation = stratified_split(
        remainder, validation_fraction, derive_seed(seed, 1)
    )
    return SplitResult(train=train, validation=validation, test=test, seed=seed)


def cohens_kappa(a: Sequence, b: Sequence) -> float:
    """Chance-corrected agreement between two equal-length label sequences.

    Returns (p_o - p_e) / (1 - p_e), evaluated in integer arithmetic with
    a single final division so small cases come out exact:
    (n * agreements - S) / (n^2 - S) with S = sum of marginal products.
    By convention 1.0 when chance agreement is 1 (both annotators
    constant on the same label).
    """
    if len(a) != len(b):
        raise ValueError("sequences must have equal length")
    if not a:
        raise ValueError("sequences must be non-empty")
    n = len(a)
    agreements = sum(1 for x, y in zip(a, b) if x == y)
    counts_a = Counter(a)
    counts_b = Counter(b)
    marginal = sum(counts_a[label] * counts_b.get(label, 0) for label in counts_a)
    if marginal == n * n:
        return 1.0
    return (n * agreements - marginal) / (n * n - marginal)


def filter_disagreements(a: Corpus, b: Corpus) -> Corpus:
    """Merge two annotation passes, dropping tweets the passes label differently.

    Doubly-annotated tweets are kept when the labels agree; tweets seen by
    only one annotator are kept with their sole label.  Output order is
    `a`'s order followed by the `b`-only items in `b`'s order.
    """
    b_by_id = {item.tweet.id: item for item in b}
    kept: list[AnnotatedTweet] = []
    for item in a:
        other = b_by_id.get(item.tweet.id)
        if other is None or other.label == item.label:
            kept.append(item)
    a_ids = {item.tweet.id for item in a}
    kept.extend(item for item in b if item.tweet.id not in a_ids)
    return Corpus(tuple(kept), provenance="agreement-filtered")
