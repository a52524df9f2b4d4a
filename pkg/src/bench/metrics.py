"""
Evaluation metrics for anomaly rankings.

ROC-AUC counts tied scores as half a win; PR-AUC is average precision with
tied scores entering together (no interpolation).
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, Optional

import numpy as np
from sklearn.metrics import (
    average_precision_score,
    confusion_matrix,
    f1_score,
    precision_score,
    recall_score,
    roc_auc_score,
)

from src.core.errors import MetricError, ShapeError
from src.core.seeding import make_rng


@dataclass
class EvalResult:
    """Ranking metrics plus thresholded precision/recall/F1 and the confusion counts"""
    roc_auc: Optional[float] = None
    pr_auc: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1_weighted: Optional[float] = None
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _binary_labels(labels: Iterable[int], size: Optional[int] = None) -> np.ndarray:
    labels = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels)
    if labels.ndim != 1:
        raise ShapeError("labels must be one-dimensional")
    if size is not None and len(labels) != size:
        raise ShapeError(f"{len(labels)} labels for {size} scores")
    if not np.all(np.isin(labels, (0, 1))):
        raise MetricError("labels must be 0 or 1")
    return labels.astype(np.int64)


def _scores(scores: Iterable[float]) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 1:
        raise ShapeError("scores must be one-dimensional")
    if not np.all(np.isfinite(scores)):
        raise MetricError("scores must be finite")
    return scores


def roc_auc(scores: Iterable[float], labels: Iterable[int]) -> float:
    """
    Probability that a random positive outranks a random negative (ties count 1/2).

    Raises:
        MetricError: labels of a single class
    """
    scores = _scores(scores)
    labels = _binary_labels(labels, len(scores))
    if len(np.unique(labels)) < 2:
        raise MetricError("ROC-AUC needs both positive and negative labels")
    return float(roc_auc_score(labels, scores))


def pr_auc(scores: Iterable[float], labels: Iterable[int]) -> float:
    """
    Average precision over descending score groups.

    Raises:
        MetricError: no positive label
    """
    scores = _scores(scores)
    labels = _binary_labels(labels, len(scores))
    if labels.sum() == 0:
        raise MetricError("PR-AUC needs at least one positive label")
    return float(average_precision_score(labels, scores))


def prf1(flagged: Iterable[int], labels: Iterable[int]) -> EvalResult:
    """
    Precision and recall of the anomaly class for a flagged node set, and the
    support-weighted F1 over both classes. An empty flagged set has precision 0.
    """
    labels = _binary_labels(labels)
    predicted = np.zeros(len(labels), dtype=np.int64)
    flagged = np.asarray(list(flagged), dtype=np.int64)
    if len(flagged) and (flagged.min() < 0 or flagged.max() >= len(labels)):
        raise ShapeError("flagged node index outside the label range")
    predicted[flagged] = 1

    tn, fp, fn, tp = confusion_matrix(labels, predicted, labels=[0, 1]).ravel()
    return EvalResult(
        precision=float(precision_score(labels, predicted, zero_division=0)),
        recall=float(recall_score(labels, predicted, zero_division=0)),
        f1_weighted=float(f1_score(labels, predicted, average="weighted", zero_division=0)),
        tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn),
    )


def evaluate(scores: Iterable[float], labels: Iterable[int],
             flagged: Optional[Iterable[int]] = None) -> EvalResult:
    """All metrics at once; threshold metrics only when a flagged set is given"""
    scores = _scores(scores)
    labels = _binary_labels(labels, len(scores))
    result = prf1(flagged, labels) if flagged is not None else EvalResult()
    result.roc_auc = roc_auc(scores, labels)
    result.pr_auc = pr_auc(scores, labels)
    return result


def random_baseline(n: int, rng_seed: int = 0) -> np.ndarray:
    """Uniform random scores in [0, 1), one per node"""
    if n < 1:
        raise MetricError(f"random baseline needs n >= 1, got {n}")
    return make_rng(rng_seed, "random-baseline").random(n)
