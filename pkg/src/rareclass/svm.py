"""Class-weighted soft-margin SVM with RBF and linear kernels, trained by
sequential minimal optimization (SMO).

For every unordered class pair the solver minimizes the dual

    f(a) = 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j) - sum_i a_i
    s.t.  0 <= a_i <= C * w(class_i),   sum_i a_i y_i = 0

using maximal-violating-pair working-set selection: with u_t the
bias-free decision value at training point t and g_t = y_t - u_t, the
pair (i, j) maximizes g_i over the "up" set and minimizes g_j over the
"down" set; optimization stops when g_i - g_j <= tolerance, which bounds
every KKT violation by the tolerance.  The two-variable subproblem is
solved analytically and clipped to its feasible segment, so the equality
constraint is preserved exactly.

Multi-class prediction is one-vs-one: each pair votes via the sign of
its decision value; vote ties break by the larger sum of winning
|decision values|, then by class order.  Training is deterministic given
the instance order, and trained models are immutable.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .corpus import Label, LABELS, label_index
from .features import SparseVector

logger = logging.getLogger(__name__)

KERNEL_RBF = "rbf"
KERNEL_LINEAR = "linear"

_BOUND_SNAP = 1e-12


def rbf_kernel(x: SparseVector, y: SparseVector, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2); 1.0 exactly when x equals y."""
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    return math.exp(-gamma * x.squared_distance(y))


def linear_kernel(x: SparseVector, y: SparseVector) -> float:
    return x.dot(y)


@dataclass(frozen=True)
class SvmParams:
    """Hyperparameters; `gamma=None` means 1/dim, `class_weights=None`
    means inverse-frequency weights N / (K * N_c)."""

    c: float = 100.0
    kernel: str = KERNEL_RBF
    gamma: float | None = None
    class_weights: dict[Label, float] | None = None
    tolerance: float = 1e-3
    max_iterations: int = 10_000_000

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        if self.kernel not in (KERNEL_RBF, KERNEL_LINEAR):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.gamma is not None and self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.class_weights is not None:
            for label, w in self.class_weights.items():
                if w <= 0.0:
                    raise ValueError(f"weight for {label.value} must be positive")


class _PackedVectors:
    """Column-sliced view of a vector list for fast kernel-row evaluation."""

    def __init__(self, vectors: Sequence[SparseVector]):
        self.vectors = list(vectors)
        self.n = len(self.vectors)
        dim = self.vectors[0].dim if self.vectors else 0
        self.dim = dim
        entries: list[tuple[int, int, float]] = []
        for row, vec in enumerate(self.vectors):
            for col, val in zip(vec.indices, vec.values):
                entries.append((col, row, val))
        entries.sort(key=lambda e: e[0])
        self._col_rows: dict[int, np.ndarray] = {}
        self._col_vals: dict[int, np.ndarray] = {}
        start = 0
        for pos in range(len(entries) + 1):
            if pos == len(entries) or (pos > start and entries[pos][0] != entries[start][0]):
                col = entries[start][0]
                block = entries[start:pos]
                self._col_rows[col] = np.array([r for _, r, _ in block], dtype=np.intp)
                self._col_vals[col] = np.array([v for _, _, v in block])
                start = pos
        self.sq_norms = np.array([v.squared_norm() for v in self.vectors])

    def dots(self, vec: SparseVector) -> np.ndarray:
        """Dot product of `vec` against every packed row."""
        out = np.zeros(self.n)
        for col, val in zip(vec.indices, vec.values):
            rows = self._col_rows.get(col)
            if rows is not None:
                out[rows] += val * self._col_vals[col]
        return out

    def kernel_row(self, i: int, kernel: str, gamma: float) -> np.ndarray:
        vec = self.vectors[i]
        dots = self.dots(vec)
        if kernel == KERNEL_LINEAR:
            return dots
        sq = self.sq_norms[i] + self.sq_norms - 2.0 * dots
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)

    def kernel_against(self, vec: SparseVector, kernel: str, gamma: float) -> np.ndarray:
        dots = self.dots(vec)
        if kernel == KERNEL_LINEAR:
            return dots
        sq = vec.squared_norm() + self.sq_norms - 2.0 * dots
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)


class _RowCache:
    """Least-recently-used cache of kernel rows keyed by instance index."""

    def __init__(self, packed: _PackedVectors, kernel: str, gamma: float, capacity: int = 512):
        self._packed = packed
        self._kernel = kernel
        self._gamma = gamma
        self._capacity = capacity
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        row = self._packed.kernel_row(i, self._kernel, self._gamma)
        self._rows[i] = row
        if len(self._rows) > self._capacity:
            self._rows.popitem(last=False)
        return row


def _smo_solve(
    packed: _PackedVectors,
    y: np.ndarray,
    box: np.ndarray,
    kernel: str,
    gamma: float,
    tolerance: float,
    max_iterations: int,
) -> tuple[np.ndarray, float, int, bool]:
    """Run SMO on one binary subproblem; returns (alpha, bias, iters, converged)."""
    n = len(y)
    alpha = np.zeros(n)
    u = np.zeros(n)  # bias-free decision values at the training points
    cache = _RowCache(packed, kernel, gamma)
    pos = y > 0
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        g = y - u
        up = (pos & (alpha < box)) | (~pos & (alpha > 0.0))
        down = (~pos & (alpha < box)) | (pos & (alpha > 0.0))
        if not up.any() or not down.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(g[up])])
        j = int(np.flatnonzero(down)[np.argmin(g[down])])
        if g[i] - g[j] <= tolerance:
            converged = True
            break
        row_i = cache.row(i)
        row_j = cache.row(j)
        eta = row_i[i] + row_j[j] - 2.0 * row_i[j]
        if eta <= 0.0:
            eta = 1e-12
        a_i, a_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            low = max(0.0, a_j - a_i)
            high = min(box[j], box[i] + a_j - a_i)
        else:
            low = max(0.0, a_i + a_j - box[i])
            high = min(box[j], a_i + a_j)
        # E = u - y, so E_i - E_j = g_j - g_i
        a_j_new = a_j + y[j] * (g[j] - g[i]) / eta
        a_j_new = min(max(a_j_new, low), high)
        a_i_new = a_i + y[i] * y[j] * (a_j - a_j_new)
        if a_i_new < _BOUND_SNAP:
            a_i_new = 0.0
        elif a_i_new > box[i] - _BOUND_SNAP:
            a_i_new = box[i]
        if a_j_new < _BOUND_SNAP:
            a_j_new = 0.0
        elif a_j_new > box[j] - _BOUND_SNAP:
            a_j_new = box[j]
        delta_i = (a_i_new - a_i) * y[i]
        delta_j = (a_j_new - a_j) * y[j]
        alpha[i] = a_i_new
        alpha[j] = a_j_new
        u += delta_i * row_i + delta_j * row_j
    else:
        logger.warning(
            "smo hit the iteration cap (%d) before reaching tolerance %g",
            max_iterations,
            tolerance,
        )
    g = y - u
    free = (alpha > 0.0) & (alpha < box)
    if free.any():
        bias = float(np.mean(g[free]))
    else:
        up = (pos & (alpha < box)) | (~pos & (alpha > 0.0))
        down = (~pos & (alpha < box)) | (pos & (alpha > 0.0))
        if up.any() and down.any():
            bias = float((g[up].max() + g[down].min()) / 2.0)
        else:
            bias = float(np.mean(g))
    return alpha, bias, iterations, converged


def solve_binary(
    vectors: Sequence[SparseVector],
    y_pm: Sequence[int],
    box: Sequence[float],
    kernel: str = KERNEL_RBF,
    gamma: float = 1.0,
    tolerance: float = 1e-3,
    max_iterations: int = 10_000_000,
) -> tuple[list[float], float, int, bool]:
    """Solve one binary subproblem directly; `y_pm` holds +1/-1 labels.

    Returns (alpha, bias, iterations, converged) with alpha over every
    training instance, support vectors or not.
    """
    packed = _PackedVectors(list(vectors))
    alpha, bias, iterations, converged = _smo_solve(
        packed,
        np.asarray(y_pm, dtype=float),
        np.asarray(box, dtype=float),
        kernel,
        gamma,
        tolerance,
        max_iterations,
    )
    return [float(a) for a in alpha], bias, iterations, converged


@dataclass(frozen=True)
class PairModel:
    """One binary subproblem: support vectors with their dual weights.

    `y` holds +1 for `positive_label` instances and -1 for
    `negative_label` instances; the decision value for a query q is
    sum_i alpha_i y_i K(sv_i, q) + bias, voting positive when > 0.
    """

    positive_label: Label
    negative_label: Label
    support: tuple[SparseVector, ...]
    alpha: tuple[float, ...]
    y: tuple[int, ...]
    bias: float
    iterations: int
    converged: bool

    def _packed_support(self) -> _PackedVectors:
        packed = getattr(self, "_packed", None)
        if packed is None:
            packed = _PackedVectors(self.support)
            object.__setattr__(self, "_packed", packed)
        return packed

    def decision_value(self, vec: SparseVector, kernel: str, gamma: float) -> float:
        if not self.support:
            return self.bias
        k = self._packed_support().kernel_against(vec, kernel, gamma)
        coef = np.asarray(self.alpha) * np.asarray(self.y, dtype=float)
        return float(coef @ k + self.bias)


@dataclass(frozen=True)
class SvmModel:
    """One-vs-one multi-class model over scaled sparse vectors."""

    labels: tuple[Label, ...]
    pairs: tuple[PairModel, ...]
    params: SvmParams
    gamma: float
    class_weights: dict[Label, float]
    dim: int


def inverse_frequency_weights(labels: Sequence[Label]) -> dict[Label, float]:
    """N / (K * N_c) per present class: the balanced weighting scheme."""
    present = [lbl for lbl in LABELS if lbl in set(labels)]
    n = len(labels)
    k = len(present)
    return {
        lbl: n / (k * sum(1 for x in labels if x == lbl)) for lbl in present
    }


def train_svm(
    vectors: Sequence[SparseVector],
    labels: Sequence[Label],
    params: SvmParams | None = None,
) -> SvmModel:
    """Train a one-vs-one SVM; deterministic given instance order."""
    params = params or SvmParams()
    if not vectors:
        raise ValueError("training set is empty")
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels must align")
    dim = vectors[0].dim
    for vec in vectors:
        if vec.dim != dim:
            raise ValueError("dimension mismatch in training vectors")
    present = tuple(lbl for lbl in LABELS if lbl in set(labels))
    if len(present) < 2:
        raise ValueError("need at least two classes to train")
    gamma = params.gamma if params.gamma is not None else 1.0 / max(dim, 1)
    weights = params.class_weights or inverse_frequency_weights(labels)
    for lbl in present:
        if lbl not in weights:
            raise ValueError(f"missing class weight for {lbl.value}")
    pair_models = []
    for pos_label, neg_label in combinations(present, 2):
        indices = [
            i for i, lbl in enumerate(labels) if lbl == pos_label or lbl == neg_label
        ]
        sub_vectors = [vectors[i] for i in indices]
        y = np.array(
            [1.0 if labels[i] == pos_label else -1.0 for i in indices]
        )
        if not (y > 0).any() or not (y < 0).any():
            raise ValueError(
                f"degenerate pair {pos_label.value}/{neg_label.value}: one side empty"
            )
        box = np.array(
            [
                params.c * weights[pos_label if yy > 0 else neg_label]
                for yy in y
            ]
        )
        packed = _PackedVectors(sub_vectors)
        alpha, bias, iterations, converged = _smo_solve(
            packed, y, box, params.kernel, gamma, params.tolerance, params.max_iterations
        )
        sv_mask = alpha > 0.0
        pair_models.append(
            PairModel(
                positive_label=pos_label,
                negative_label=neg_label,
                support=tuple(v for v, keep in zip(sub_vectors, sv_mask) if keep),
                alpha=tuple(float(a) for a in alpha[sv_mask]),
                y=tuple(int(v) for v in y[sv_mask]),
                bias=bias,
                iterations=iterations,
                converged=converged,
            )
        )
    return SvmModel(
        labels=present,
        pairs=tuple(pair_models),
        params=params,
        gamma=gamma,
        class_weights={lbl: float(weights[lbl]) for lbl in present},
        dim=dim,
    )


def predict_svm(
    model: SvmModel, vec: SparseVector
) -> tuple[Label, dict[tuple[Label, Label], float]]:
    """Winning class plus every pairwise decision value.

    Each pair votes by sign (strictly positive favors the pair's positive
    label).  Vote ties break by the larger sum of |decision value| over
    the pairs a class won, then by class order.
    """
    if vec.dim != model.dim:
        raise ValueError("vector dimension does not match the model")
    votes = {lbl: 0 for lbl in model.labels}
    margins = {lbl: 0.0 for lbl in model.labels}
    decisions: dict[tuple[Label, Label], float] = {}
    for pair in model.pairs:
        value = pair.decision_value(vec, model.params.kernel, model.gamma)
        decisions[(pair.positive_label, pair.negative_label)] = value
        winner = pair.positive_label if value > 0.0 else pair.negative_label
        votes[winner] += 1
        margins[winner] += abs(value)
    best = max(
        model.labels,
        key=lambda lbl: (votes[lbl], margins[lbl], -label_index(lbl)),
    )
    return best, decisions


def dual_objective(
    vectors: Sequence[SparseVector],
    labels_pm: Sequence[int],
    alpha: Sequence[float],
    kernel: str,
    gamma: float,
) -> float:
    """W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij (for diagnostics/tests)."""
    n = len(vectors)
    total = float(sum(alpha))
    quad = 0.0
    for i in range(n):
        if alpha[i] == 0.0:
            continue
        for j in range(n):
            if alpha[j] == 0.0:
                continue
            if kernel == KERNEL_LINEAR:
                k = vectors[i].dot(vectors[j])
            else:
                k = math.exp(-gamma * vectors[i].squared_distance(vectors[j]))
            quad += alpha[i] * alpha[j] * labels_pm[i] * labels_pm[j] * k
    return total - 0.5 * quad


def kkt_violation(
    vectors: Sequence[SparseVector],
    labels_pm: Sequence[int],
    alpha: Sequence[float],
    box: Sequence[float],
    bias: float,
    kernel: str,
    gamma: float,
    boundary_eps: float = 1e-8,
) -> float:
    """Largest KKT violation of a candidate dual solution (for tests).

    For each i with margin m_i = y_i (f(x_i)): alpha at 0 requires
    m_i >= 1, interior alpha requires m_i == 1, alpha at the box requires
    m_i <= 1; the violation is how far the relevant inequality fails.
    """
    n = len(vectors)
    worst = 0.0
    for i in range(n):
        f = bias
        for j in range(n):
            if alpha[j] == 0.0:
                continue
            if kernel == KERNEL_LINEAR:
                k = vectors[j].dot(vectors[i])
            else:
                k = math.exp(-gamma * vectors[j].squared_distance(vectors[i]))
            f += alpha[j] * labels_pm[j] * k
        margin = labels_pm[i] * f
        if alpha[i] <= boundary_eps:
            worst = max(worst, 1.0 - margin)
        elif alpha[i] >= box[i] - boundary_eps:
            worst = max(worst, margin - 1.0)
        else:
            worst = max(worst, abs(margin - 1.0))
    return worst
