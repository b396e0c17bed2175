"""Confusion-matrix mIoU over label-map sets."""

from __future__ import annotations

import math

import numpy as np

from ..core.labels import NUM_LABELS


class ShapeMismatchError(ValueError):
    pass


def confusion(pred: np.ndarray, gt: np.ndarray, n: int = NUM_LABELS) -> np.ndarray:
    """``C[g, p]`` = pixels with ground truth ``g`` predicted as ``p``."""
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction shape {pred.shape} != ground truth shape {gt.shape}")
    idx = gt.astype(np.int64).ravel() * n + pred.astype(np.int64).ravel()
    return np.bincount(idx, minlength=n * n).reshape(n, n)


def iou_from_confusion(c: np.ndarray) -> np.ndarray:
    """Per-label IoU; NaN where a label is absent from both prediction and truth."""
    tp = np.diag(c).astype(float)
    union = c.sum(axis=0) + c.sum(axis=1) - tp
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(union > 0, tp / union, np.nan)


def _mean(iou: np.ndarray) -> float:
    vals = iou[1:]  # unlabeled is never scored
    vals = vals[np.isfinite(vals)]
    # correctly rounded sum: the mean does not depend on summation order
    return math.fsum(vals.tolist()) / len(vals) if len(vals) else float("nan")


def miou(preds, gts) -> tuple[float, dict[int, float]]:
    """Dataset-level mIoU from global confusion counts over labels 1..10.

    Returns ``(mean, {label index: IoU})``; labels absent from both sets are
    left out of the mean and reported as NaN.
    """
    preds = list(preds) if not isinstance(preds, np.ndarray) or preds.ndim > 2 else [preds]
    gts = list(gts) if not isinstance(gts, np.ndarray) or gts.ndim > 2 else [gts]
    if len(preds) != len(gts):
        raise ShapeMismatchError(f"{len(preds)} predictions for {len(gts)} ground-truth maps")
    c = np.zeros((NUM_LABELS, NUM_LABELS), np.int64)
    for p, g in zip(preds, gts):
        c += confusion(p, g)
    iou = iou_from_confusion(c)
    return _mean(iou), {k: float(iou[k]) for k in range(1, NUM_LABELS)}


def per_image_miou(preds, gts) -> list[float]:
    """mIoU of each image on its own (for the per-image histogram)."""
    out = []
    for p, g in zip(preds, gts):
        out.append(_mean(iou_from_confusion(confusion(p, g))))
    return out
