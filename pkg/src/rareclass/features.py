"""Sparse feature engineering: n-grams, word-cluster features, structural
features, vocabulary construction, min-max scaling, and information-gain
ranking.

Vocabularies and scalers are immutable once fitted and are built from
training data only.  Feature names are namespaced by kind: raw n-gram
strings, ``cluster:<path>`` for word-cluster features, and ``struct:*``
for the two structural columns.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Label, LABELS
from .errors import DataError

logger = logging.getLogger(__name__)

CLUSTER_PREFIX = "cluster:"
STRUCT_CHAR_LENGTH = "struct:char_length"
STRUCT_WORD_LENGTH = "struct:word_length"
STRUCTURAL_FEATURES = (STRUCT_CHAR_LENGTH, STRUCT_WORD_LENGTH)

KIND_NGRAM = "ngram"
KIND_CLUSTER = "cluster"
KIND_STRUCTURAL = "structural"


def feature_kind(name: str) -> str:
    if name.startswith(CLUSTER_PREFIX):
        return KIND_CLUSTER
    if name in STRUCTURAL_FEATURES:
        return KIND_STRUCTURAL
    return KIND_NGRAM


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, value) pairs over a fixed dimension.

    Indices are strictly increasing and in range; values are finite and
    non-zero (zeros are dropped at construction via `from_pairs`).
    """

    indices: tuple[int, ...]
    values: tuple[float, ...]
    dim: int

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        prev = -1
        for i in self.indices:
            if i <= prev:
                raise ValueError("indices must be strictly increasing")
            prev = i
        if prev >= self.dim:
            raise ValueError("index out of range for dimension")
        if self.indices and self.indices[0] < 0:
            raise ValueError("negative index")
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError("values must be finite")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]], dim: int) -> "SparseVector":
        kept = sorted((i, float(v)) for i, v in pairs if v != 0.0)
        return cls(
            tuple(i for i, _ in kept), tuple(v for _, v in kept), dim
        )

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))

    def dot(self, other: "SparseVector") -> float:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        total = 0.0
        i = j = 0
        a_idx, a_val = self.indices, self.values
        b_idx, b_val = other.indices, other.values
        while i < len(a_idx) and j < len(b_idx):
            ai, bj = a_idx[i], b_idx[j]
            if ai == bj:
                total += a_val[i] * b_val[j]
                i += 1
                j += 1
            elif ai < bj:
                i += 1
            else:
                j += 1
        return total

    def squared_norm(self) -> float:
        return sum(v * v for v in self.values)

    def squared_distance(self, other: "SparseVector") -> float:
        return self.squared_norm() + other.squared_norm() - 2.0 * self.dot(other)


def interpolate(a: SparseVector, b: SparseVector, fraction: float) -> SparseVector:
    """Point on the segment from `a` to `b`: a + fraction * (b - a)."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    merged = a.to_dict()
    for i, v in zip(b.indices, b.values):
        merged[i] = merged.get(i, 0.0) + fraction * v
    for i, v in zip(a.indices, a.values):
        merged[i] = merged.get(i, 0.0) - fraction * v
    return SparseVector.from_pairs(merged.items(), a.dim)


@dataclass(frozen=True)
class Vocabulary:
    """Feature-name-to-column map with per-feature kinds."""

    names: tuple[str, ...]
    kinds: tuple[str, ...]
    min_df: int

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {name: i for i, name in enumerate(self.names)}
        )
        if len(self._index) != len(self.names):
            raise ValueError("duplicate feature names")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int | None:
        return self._index.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._index


@dataclass(frozen=True)
class ClusterMap:
    """Token to hierarchical-cluster-path map (paths are 0/1 strings)."""

    mapping: dict[str, str]
    source: str = ""

    def get(self, token: str) -> str | None:
        return self.mapping.get(token)

    def __len__(self) -> int:
        return len(self.mapping)


def extract_ngrams(tokens: Sequence[str], n_min: int = 1, n_max: int = 3) -> Counter:
    """All contiguous n-grams for n in [n_min, n_max], space-joined."""
    if not (1 <= n_min <= n_max):
        raise ValueError("need 1 <= n_min <= n_max")
    grams: Counter = Counter()
    for n in range(n_min, n_max + 1):
        for i in range(len(tokens) - n + 1):
            grams[" ".join(tokens[i : i + n])] += 1
    return grams


def load_clusters(path: str | Path) -> ClusterMap:
    """Read a cluster file of ``bitstring<TAB>token<TAB>count`` lines.

    A token repeated on a later line overwrites the earlier entry, with a
    warning.  An empty file yields an empty map (cluster features are then
    simply absent).
    """
    path = Path(path)
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 3:
            raise DataError(f"{path}: expected 3 columns at line {lineno}")
        bits, token, count = fields
        if not bits or any(ch not in "01" for ch in bits):
            raise DataError(f"{path}: bad cluster path {bits!r} at line {lineno}")
        try:
            int(count)
        except ValueError:
            raise DataError(f"{path}: non-integer count at line {lineno}") from None
        if token in mapping:
            logger.warning("cluster file %s: token %r redefined at line %d", path, token, lineno)
        mapping[token] = bits
    return ClusterMap(mapping, source=str(path))


def cluster_features(tokens: Sequence[str], clusters: ClusterMap) -> Counter:
    """One ``cluster:<path>`` feature per token occurrence found in the map."""
    feats: Counter = Counter()
    for token in tokens:
        path = clusters.get(token)
        if path is not None:
            feats[CLUSTER_PREFIX + path] += 1
    return feats


def structural_features(raw_text: str) -> tuple[int, int]:
    """(character count, whitespace-delimited word count) of the raw text."""
    return len(raw_text), len(raw_text.split())


def build_vocabulary(
    train_docs: Iterable[Mapping[str, int]],
    min_df: int = 2,
    include_structural: bool = False,
) -> Vocabulary:
    """Keep features appearing in at least `min_df` distinct documents.

    Column indices follow lexicographic feature-name order, so identical
    corpora always produce identical vocabularies.  The two structural
    columns, when requested, are always included.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: Counter = Counter()
    for doc in train_docs:
        df.update(set(doc))
    names = {name for name, count in df.items() if count >= min_df}
    if include_structural:
        names.update(STRUCTURAL_FEATURES)
    ordered = tuple(sorted(names))
    return Vocabulary(ordered, tuple(feature_kind(n) for n in ordered), min_df)


def vectorize(
    doc_features: Mapping[str, int],
    structural: tuple[int, int] | None,
    vocab: Vocabulary,
    binary: bool = True,
) -> SparseVector:
    """Map one document's features into the vocabulary's column space.

    N-gram and cluster columns get 1.0 (binary mode, the default) or the
    occurrence count; structural columns always carry their raw counts.
    Features absent from the vocabulary are ignored.
    """
    pairs: list[tuple[int, float]] = []
    for name, count in doc_features.items():
        col = vocab.index_of(name)
        if col is not None:
            pairs.append((col, 1.0 if binary else float(count)))
    if structural is not None:
        chars, words = structural
        for name, value in ((STRUCT_CHAR_LENGTH, chars), (STRUCT_WORD_LENGTH, words)):
            col = vocab.index_of(name)
            if col is not None:
                pairs.append((col, float(value)))
    return SparseVector.from_pairs(pairs, vocab.dim)


@dataclass(frozen=True)
class Scaler:
    """Per-column (min, max) learned from training vectors only."""

    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.mins)


def fit_scaler(train_vectors: Sequence[SparseVector]) -> Scaler:
    """Column ranges over the training vectors, implicit zeros included."""
    if not train_vectors:
        raise ValueError("cannot fit a scaler on zero vectors")
    dim = train_vectors[0].dim
    mins = [math.inf] * dim
    maxs = [-math.inf] * dim
    seen = [0] * dim
    for vec in train_vectors:
        if vec.dim != dim:
            raise ValueError("dimension mismatch")
        for i, v in zip(vec.indices, vec.values):
            seen[i] += 1
            if v < mins[i]:
                mins[i] = v
            if v > maxs[i]:
                maxs[i] = v
    n = len(train_vectors)
    for i in range(dim):
        if seen[i] < n:  # at least one implicit zero in this column
            mins[i] = min(mins[i], 0.0)
            maxs[i] = max(maxs[i], 0.0)
    return Scaler(tuple(mins), tuple(maxs))


def apply_scaler(scaler: Scaler, vec: SparseVector) -> SparseVector:
    """Map column value x to (x - min) / (max - min); constant columns to 0.

    Values outside the training range are not clamped.  Columns whose
    training minimum is non-zero produce entries even where the input had
    an implicit zero.
    """
    if vec.dim != scaler.dim:
        raise ValueError("dimension mismatch")
    explicit = vec.to_dict()
    columns = set(explicit)
    columns.update(
        i
        for i in range(scaler.dim)
        if scaler.mins[i] != 0.0 and scaler.maxs[i] > scaler.mins[i]
    )
    pairs = []
    for i in columns:
        lo, hi = scaler.mins[i], scaler.maxs[i]
        if hi > lo:
            pairs.append((i, (explicit.get(i, 0.0) - lo) / (hi - lo)))
    return SparseVector.from_pairs(pairs, vec.dim)


def _entropy(counts: Sequence[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def information_gain(
    vectors: Sequence[SparseVector],
    labels: Sequence[Label],
    vocab: Vocabulary,
) -> list[tuple[str, float]]:
    """Rank features by label-entropy reduction under binary presence.

    IG(f) = H(Y) - P(f) H(Y | f present) - (1 - P(f)) H(Y | f absent),
    in bits; ties are broken by feature name.
    """
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels must align")
    n = len(vectors)
    label_counts = Counter(labels)
    total_counts = [label_counts.get(lbl, 0) for lbl in LABELS]
    h_y = _entropy(total_counts)
    present: dict[int, list[int]] = {}
    for vec, label in zip(vectors, labels):
        li = LABELS.index(label)
        for col, value in zip(vec.indices, vec.values):
            if value != 0.0:
                present.setdefault(col, [0] * len(LABELS))[li] += 1
    ranked: list[tuple[str, float]] = []
    for col, name in enumerate(vocab.names):
        with_f = present.get(col, [0] * len(LABELS))
        n_with = sum(with_f)
        without_f = [t - w for t, w in zip(total_counts, with_f)]
        p = n_with / n if n else 0.0
        ig = h_y - p * _entropy(with_f) - (1.0 - p) * _entropy(without_f)
        ranked.append((name, max(ig, 0.0)))
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked
