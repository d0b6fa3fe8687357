"""Versioned JSON persistence for trained models.

A model file embeds everything prediction needs: classifier parameters,
the vocabulary (names and kinds), the fitted scaler (SVM only), and the
per-pair support vectors with their dual coefficients, or the Naive
Bayes tables.  Floats round-trip exactly through JSON's repr encoding,
so a reloaded model predicts bit-identically.  Files are written with
sorted keys and fixed separators, so identical models produce identical
bytes.  Loading rejects unknown format names or versions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import Label
from .errors import DataError
from .features import Scaler, SparseVector, Vocabulary
from .naive_bayes import NbModel
from .svm import PairModel, SvmModel, SvmParams

FORMAT_NAME = "rareclass.model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class StoredModel:
    """A deserialized model plus the feature machinery saved with it."""

    classifier: SvmModel | NbModel
    vocabulary: Vocabulary
    scaler: Scaler | None
    extras: dict

    @property
    def kind(self) -> str:
        return "svm" if isinstance(self.classifier, SvmModel) else "nb"


def _vector_to_json(vec: SparseVector) -> dict:
    return {"i": list(vec.indices), "v": list(vec.values), "d": vec.dim}


def _vector_from_json(obj: dict) -> SparseVector:
    return SparseVector(tuple(obj["i"]), tuple(obj["v"]), obj["d"])


def _svm_to_json(model: SvmModel) -> dict:
    return {
        "labels": [lbl.value for lbl in model.labels],
        "dim": model.dim,
        "gamma": model.gamma,
        "class_weights": {lbl.value: w for lbl, w in model.class_weights.items()},
        "params": {
            "c": model.params.c,
            "kernel": model.params.kernel,
            "gamma": model.params.gamma,
            "tolerance": model.params.tolerance,
            "max_iterations": model.params.max_iterations,
        },
        "pairs": [
            {
                "positive": pair.positive_label.value,
                "negative": pair.negative_label.value,
                "bias": pair.bias,
                "alpha": list(pair.alpha),
                "y": list(pair.y),
                "support": [_vector_to_json(v) for v in pair.support],
                "iterations": pair.iterations,
                "converged": pair.converged,
            }
            for pair in model.pairs
        ],
    }


def _svm_from_json(obj: dict) -> SvmModel:
    params_obj = obj["params"]
    labels = tuple(Label(v) for v in obj["labels"])
    class_weights = {Label(k): float(v) for k, v in obj["class_weights"].items()}
    params = SvmParams(
        c=params_obj["c"],
        kernel=params_obj["kernel"],
        gamma=params_obj["gamma"],
        class_weights=class_weights,
        tolerance=params_obj["tolerance"],
        max_iterations=params_obj["max_iterations"],
    )
    pairs = tuple(
        PairModel(
            positive_label=Label(p["positive"]),
            negative_label=Label(p["negative"]),
            support=tuple(_vector_from_json(v) for v in p["support"]),
            alpha=tuple(p["alpha"]),
            y=tuple(p["y"]),
            bias=p["bias"],
            iterations=p["iterations"],
            converged=p["converged"],
        )
        for p in obj["pairs"]
    )
    return SvmModel(
        labels=labels,
        pairs=pairs,
        params=params,
        gamma=obj["gamma"],
        class_weights=class_weights,
        dim=obj["dim"],
    )


def _nb_to_json(model: NbModel) -> dict:
    out = {
        "labels": [lbl.value for lbl in model.labels],
        "log_priors": list(model.log_priors),
        "event_model": model.event_model,
        "dim": model.dim,
    }
    if model.log_likelihood is not None:
        out["log_likelihood"] = [list(row) for row in model.log_likelihood]
    if model.means is not None:
        out["means"] = [list(row) for row in model.means]
        out["variances"] = [list(row) for row in model.variances]
    return out


def _nb_from_json(obj: dict) -> NbModel:
    return NbModel(
        labels=tuple(Label(v) for v in obj["labels"]),
        log_priors=tuple(obj["log_priors"]),
        event_model=obj["event_model"],
        dim=obj["dim"],
        log_likelihood=(
            tuple(tuple(row) for row in obj["log_likelihood"])
            if "log_likelihood" in obj
            else None
        ),
        means=tuple(tuple(row) for row in obj["means"]) if "means" in obj else None,
        variances=(
            tuple(tuple(row) for row in obj["variances"]) if "variances" in obj else None
        ),
    )


def save_model(
    path: str | Path,
    classifier: SvmModel | NbModel,
    vocabulary: Vocabulary,
    scaler: Scaler | None = None,
    extras: dict | None = None,
) -> None:
    kind = "svm" if isinstance(classifier, SvmModel) else "nb"
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "vocabulary": {
            "names": list(vocabulary.names),
            "kinds": list(vocabulary.kinds),
            "min_df": vocabulary.min_df,
        },
        "scaler": (
            None if scaler is None else {"mins": list(scaler.mins), "maxs": list(scaler.maxs)}
        ),
        "extras": extras or {},
        kind: _svm_to_json(classifier) if kind == "svm" else _nb_to_json(classifier),
    }
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def load_model(path: str | Path) -> StoredModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise DataError(f"{path}: not a rareclass model file")
    if doc.get("version") != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported model version {doc.get('version')!r}")
    vocab_obj = doc["vocabulary"]
    vocabulary = Vocabulary(
        tuple(vocab_obj["names"]), tuple(vocab_obj["kinds"]), vocab_obj["min_df"]
    )
    scaler_obj = doc.get("scaler")
    scaler = (
        None
        if scaler_obj is None
        else Scaler(tuple(scaler_obj["mins"]), tuple(scaler_obj["maxs"]))
    )
    kind = doc.get("kind")
    if kind == "svm":
        classifier: SvmModel | NbModel = _svm_from_json(doc["svm"])
    elif kind == "nb":
        classifier = _nb_from_json(doc["nb"])
    else:
        raise DataError(f"{path}: unknown classifier kind {kind!r}")
    return StoredModel(classifier, vocabulary, scaler, doc.get("extras", {}))
