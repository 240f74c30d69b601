"""Regression (nMSE, variance explained) and classification (ROC, AUC) metrics.

nMSE is pooled squared error over pooled per-task-centered response energy:

    nMSE = sum_i ||yhat_i - y_i||^2  /  sum_i ||y_i - mean(y_i)||^2

so VE = 1 - nMSE holds exactly (a perfect predictor scores VE 1, the per-task
mean predictor scores VE 0).
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabelsError, UndefinedMetricError


def nmse(tasks_true, tasks_pred):
    """Normalized mean squared error over a list of per-task vectors."""
    num = 0.0
    den = 0.0
    for t, (y, yhat) in enumerate(zip(tasks_true, tasks_pred)):
        y = np.asarray(y, dtype=np.float64)
        yhat = np.asarray(yhat, dtype=np.float64)
        if y.shape != yhat.shape:
            raise ValueError(f"task {t}: truth has shape {y.shape}, prediction {yhat.shape}")
        err = yhat - y
        num += float(err @ err)
        centered = y - y.mean()
        den += float(centered @ centered)
    if den == 0.0:
        raise UndefinedMetricError("all responses are constant; nMSE is undefined")
    return num / den


def variance_explained(tasks_true, tasks_pred):
    """VE = 1 - nMSE."""
    return 1.0 - nmse(tasks_true, tasks_pred)


@dataclass(frozen=True)
class RocCurve:
    """Operating points from (0,0) to (1,1), one per distinct score, and their
    trapezoidal area."""

    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def roc_auc(scores, labels):
    """ROC curve from real-valued scores against binary labels.

    Thresholds sweep the distinct scores in descending order; tied scores are
    grouped into a single operating point.  Needs both classes present.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors")
    positives = int((labels == 1).sum())
    negatives = int((labels == 0).sum())
    if positives + negatives != labels.shape[0]:
        raise ValueError("labels must be 0 or 1")
    if positives == 0 or negatives == 0:
        raise DegenerateLabelsError(
            f"need both classes, got {positives} positives and {negatives} negatives"
        )
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = (labels[order] == 1).astype(np.float64)
    # last index of each tied-score group
    distinct = np.nonzero(np.diff(sorted_scores))[0]
    boundaries = np.concatenate([distinct, [scores.shape[0] - 1]])
    tp = np.cumsum(sorted_labels)[boundaries]
    fp = boundaries + 1 - tp
    tpr = np.concatenate([[0.0], tp / positives])
    fpr = np.concatenate([[0.0], fp / negatives])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(fpr=fpr, tpr=tpr, auc=auc)


@dataclass(frozen=True)
class MacroRoc:
    fpr_grid: np.ndarray
    mean_tpr: np.ndarray
    std_tpr: np.ndarray
    mean_auc: float
    std_auc: float


def macro_roc(curves, grid_points=101):
    """Average of per-task ROC curves on a common false-positive-rate grid.

    Curves are linearly interpolated onto the grid (vertical jumps keep their
    upper value); the band is the pointwise standard deviation.  ``mean_auc``
    averages the member AUCs directly rather than integrating the mean curve.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("macro_roc needs at least one curve")
    grid = np.linspace(0.0, 1.0, grid_points)
    resampled = np.empty((len(curves), grid_points))
    for c, curve in enumerate(curves):
        # keep the last (= highest, tpr is nondecreasing) point per fpr value
        keep = np.concatenate([np.diff(curve.fpr) > 0.0, [True]])
        resampled[c] = np.interp(grid, curve.fpr[keep], curve.tpr[keep])
    aucs = np.array([curve.auc for curve in curves])
    return MacroRoc(
        fpr_grid=grid,
        mean_tpr=resampled.mean(axis=0),
        std_tpr=resampled.std(axis=0),
        mean_auc=float(aucs.mean()),
        std_auc=float(aucs.std()),
    )
