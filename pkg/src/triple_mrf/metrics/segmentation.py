# SPDX-License-Identifier: GPL-3.0-or-later
"""
Pixel counting metrics: confusion counts, intersection-over-union and tagging accuracy.

Ground truth pixels equal to the ignore label are left out of every count.
"""

from typing import NamedTuple, Tuple

import numpy as np

from triple_mrf.errors import LabelRangeError, ShapeMismatchError

TAG_THRESHOLD = 0.001


class ConfusionCounts(NamedTuple):
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def check_pair(pred: np.ndarray, gt: np.ndarray, num_labels: int, ignore_label: int = None):
    """
    Validate a prediction against its ground truth and return the mask of counted pixels.

    Parameters
    ----------
    pred : np.ndarray
        The H×W predicted labels.

    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    ignore_label : int, optional
        Ground truth pixels with this label are not counted.

    Returns
    -------
    tuple of (np.ndarray, np.ndarray, np.ndarray)
        The prediction, the ground truth and the boolean mask of counted pixels.
    """
    pred = np.asarray(pred, dtype=np.int64)
    gt = np.asarray(gt, dtype=np.int64)
    if pred.shape != gt.shape or pred.ndim != 2:
        raise ShapeMismatchError(
            f"Prediction {pred.shape} and ground truth {gt.shape} must be equal H×W maps."
        )

    valid = np.ones(gt.shape, dtype=bool) if ignore_label is None else gt != ignore_label
    for name, labels in (("Prediction", pred), ("Ground truth", gt)):
        counted = labels[valid]
        if np.any(counted < 0) or np.any(counted >= num_labels):
            raise LabelRangeError(f"{name} labels must lie in [0, {num_labels}).")

    return pred, gt, valid


def class_masks(pred: np.ndarray, gt: np.ndarray, valid: np.ndarray, label: int):
    return (pred == label) & valid, (gt == label) & valid


def confusion_counts(
    pred: np.ndarray, gt: np.ndarray, num_labels: int, ignore_label: int = None
) -> ConfusionCounts:
    """
    True positive, false positive and false negative pixel counts of every class.

    Parameters
    ----------
    pred : np.ndarray
        The H×W predicted labels.

    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    ignore_label : int, optional
        Ground truth label left out of the counts.

    Returns
    -------
    ConfusionCounts
        Three integer arrays of length l.
    """
    pred, gt, valid = check_pair(pred, gt, num_labels, ignore_label)
    confusion = np.bincount(
        gt[valid] * num_labels + pred[valid], minlength=num_labels * num_labels
    ).reshape(num_labels, num_labels)

    tp = np.diag(confusion)

    return ConfusionCounts(tp, confusion.sum(axis=0) - tp, confusion.sum(axis=1) - tp)


def iou_from_counts(counts: ConfusionCounts) -> Tuple[np.ndarray, float]:
    """
    Per-class IoU and its mean over the classes present in either map.

    A class predicted but missing from the ground truth scores 0 and stays in the mean;
    only classes absent from both maps are left out.
    """
    union = counts.tp + counts.fp + counts.fn
    iou = np.where(union > 0, counts.tp / np.maximum(union, 1), np.nan)

    mean = float(np.nanmean(iou)) if np.any(union > 0) else float("nan")

    return iou, mean


def miou(
    pred: np.ndarray, gt: np.ndarray, num_labels: int, ignore_label: int = None
) -> Tuple[np.ndarray, float]:
    """
    Mean pixelwise intersection-over-union.

    Parameters
    ----------
    pred : np.ndarray
        The H×W predicted labels.

    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    ignore_label : int, optional
        Ground truth label left out of the counts.

    Returns
    -------
    tuple of (np.ndarray, float)
        IoU_c = TP / (TP + FP + FN) per class, NaN for classes absent from both maps, and
        the mean over the other classes.
    """
    return iou_from_counts(confusion_counts(pred, gt, num_labels, ignore_label))


def image_tags(labels: np.ndarray, valid: np.ndarray, num_labels: int, threshold: float) -> np.ndarray:
    """
    Boolean vector of the classes covering at least a threshold share of counted pixels.
    """
    counts = np.bincount(labels[valid], minlength=num_labels)[:num_labels]
    total = int(valid.sum())

    return (counts > 0) & (counts >= threshold * total)


def tag_correctness(
    pred: np.ndarray,
    gt: np.ndarray,
    num_labels: int,
    ignore_label: int = None,
    threshold: float = TAG_THRESHOLD,
) -> np.ndarray:
    """
    Per-class agreement of the predicted and ground truth image tags.
    """
    pred, gt, valid = check_pair(pred, gt, num_labels, ignore_label)

    return image_tags(pred, valid, num_labels, threshold) == image_tags(
        gt, valid, num_labels, threshold
    )


def tagging_accuracy(
    pred: np.ndarray,
    gt: np.ndarray,
    num_labels: int,
    ignore_label: int = None,
    threshold: float = TAG_THRESHOLD,
) -> float:
    """
    Tagging accuracy of one image.

    A class is a tag of a map when it covers at least ``threshold`` of the counted
    pixels. The accuracy is the share of classes whose presence is predicted correctly;
    corpus accuracy averages this over images.

    Parameters
    ----------
    pred : np.ndarray
        The H×W predicted labels.

    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    ignore_label : int, optional
        Ground truth label left out of the counts.

    threshold : float (default=0.001)
        Minimum pixel share of a tag.

    Returns
    -------
    float
        The accuracy in [0, 1].
    """
    return float(tag_correctness(pred, gt, num_labels, ignore_label, threshold).mean())
