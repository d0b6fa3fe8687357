"""Naive Bayes over sparse feature vectors.

The default event model is multinomial with add-one smoothing over the
vocabulary, treating vector values as term counts.  A Gaussian event
model (per-feature normal densities with a variance floor) is available
behind a flag for numeric feature sets.  Ties in the posterior break
toward the lowest class index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Label, LABELS, label_index
from .features import SparseVector

MULTINOMIAL = "multinomial"
GAUSSIAN = "gaussian"

_VAR_FLOOR = 1e-9


@dataclass(frozen=True)
class NbModel:
    """Trained Naive Bayes parameters; immutable and prediction-ready.

    `log_likelihood` rows hold log theta per class (multinomial); the
    Gaussian model stores per-class means/variances plus the precomputed
    log-density of zero for every column, so sparse vectors only pay for
    their non-zero entries at prediction time.
    """

    labels: tuple[Label, ...]
    log_priors: tuple[float, ...]
    event_model: str
    dim: int
    log_likelihood: tuple[tuple[float, ...], ...] | None = None
    means: tuple[tuple[float, ...], ...] | None = None
    variances: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.event_model not in (MULTINOMIAL, GAUSSIAN):
            raise ValueError(f"unknown event model {self.event_model!r}")


def train_nb(
    vectors: Sequence[SparseVector],
    labels: Sequence[Label],
    event_model: str = MULTINOMIAL,
) -> NbModel:
    """Fit class priors and per-class feature distributions."""
    if not vectors:
        raise ValueError("training set is empty")
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels must align")
    dim = vectors[0].dim
    present = tuple(lbl for lbl in LABELS if lbl in set(labels))
    class_rows = {lbl: [] for lbl in present}
    for vec, lbl in zip(vectors, labels):
        if vec.dim != dim:
            raise ValueError("dimension mismatch in training vectors")
        class_rows[lbl].append(vec)
    n = len(vectors)
    log_priors = tuple(math.log(len(class_rows[lbl]) / n) for lbl in present)

    if event_model == MULTINOMIAL:
        rows = []
        for lbl in present:
            counts = np.zeros(dim)
            for vec in class_rows[lbl]:
                if any(v < 0.0 for v in vec.values):
                    raise ValueError(
                        "multinomial event model requires non-negative feature values"
                    )
                counts[list(vec.indices)] += np.asarray(vec.values)
            theta = (counts + 1.0) / (counts.sum() + dim)
            rows.append(tuple(np.log(theta).tolist()))
        return NbModel(present, log_priors, MULTINOMIAL, dim, log_likelihood=tuple(rows))

    if event_model == GAUSSIAN:
        means, variances = [], []
        for lbl in present:
            total = np.zeros(dim)
            total_sq = np.zeros(dim)
            for vec in class_rows[lbl]:
                idx = list(vec.indices)
                vals = np.asarray(vec.values)
                total[idx] += vals
                total_sq[idx] += vals * vals
            m = len(class_rows[lbl])
            mean = total / m
            var = np.maximum(total_sq / m - mean * mean, _VAR_FLOOR)
            means.append(tuple(mean.tolist()))
            variances.append(tuple(var.tolist()))
        return NbModel(
            present, log_priors, GAUSSIAN, dim,
            means=tuple(means), variances=tuple(variances),
        )

    raise ValueError(f"unknown event model {event_model!r}")


def _log_normal_pdf(x: float, mean: float, var: float) -> float:
    return -0.5 * (math.log(2.0 * math.pi * var) + (x - mean) ** 2 / var)


def predict_nb(model: NbModel, vec: SparseVector) -> tuple[Label, dict[Label, float]]:
    """Most probable class plus the per-class log scores."""
    if vec.dim != model.dim:
        raise ValueError("vector dimension does not match the model")
    scores: dict[Label, float] = {}
    for ci, lbl in enumerate(model.labels):
        score = model.log_priors[ci]
        if model.event_model == MULTINOMIAL:
            row = model.log_likelihood[ci]
            score += sum(v * row[i] for i, v in zip(vec.indices, vec.values))
        else:
            mean = model.means[ci]
            var = model.variances[ci]
            base = sum(_log_normal_pdf(0.0, mean[j], var[j]) for j in range(model.dim))
            adjust = sum(
                _log_normal_pdf(v, mean[i], var[i])
                - _log_normal_pdf(0.0, mean[i], var[i])
                for i, v in zip(vec.indices, vec.values)
            )
            score += base + adjust
        scores[lbl] = score
    best = max(model.labels, key=lambda lbl: (scores[lbl], -label_index(lbl)))
    return best, scores
