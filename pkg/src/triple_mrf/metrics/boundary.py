# SPDX-License-Identifier: GPL-3.0-or-later
"""
Boundary accuracy: F1 of boundary pixels matched within a Chebyshev tolerance.

Only classes that are localized, with a box IoU of at least LOCALIZED_BIOU, are scored.
"""

from typing import Tuple

import numpy as np
from scipy import ndimage

from triple_mrf.errors import InvalidParameterError
from triple_mrf.metrics.localization import FOUR_CONNECTIVITY, class_box_iou
from triple_mrf.metrics.segmentation import check_pair, class_masks

DEFAULT_TOLERANCE = 2
LOCALIZED_BIOU = 0.5


def boundary_pixels(mask: np.ndarray) -> np.ndarray:
    """
    Pixels of a mask with a 4-neighbor outside it; the image border is not a boundary.
    """
    interior = ndimage.binary_erosion(mask, structure=FOUR_CONNECTIVITY, border_value=1)

    return mask & ~interior


def within_tolerance(boundary: np.ndarray, tolerance: int) -> np.ndarray:
    """
    Pixels at Chebyshev distance at most tolerance from a boundary pixel.
    """
    if not boundary.any():
        return boundary

    square = np.ones((2 * tolerance + 1, 2 * tolerance + 1), dtype=bool)

    return ndimage.binary_dilation(boundary, structure=square)


def boundary_f1(pred_mask: np.ndarray, gt_mask: np.ndarray, tolerance: int = DEFAULT_TOLERANCE) -> float:
    """
    F1 score of predicted against ground truth boundary pixels.

    Parameters
    ----------
    pred_mask : np.ndarray
        Boolean H×W mask of the predicted class.

    gt_mask : np.ndarray
        Boolean H×W mask of the ground truth class.

    tolerance : int (default=2)
        Largest Chebyshev distance at which two boundary pixels match.

    Returns
    -------
    float
        1 when both boundaries are empty, 0 when only one is.
    """
    pred_boundary = boundary_pixels(pred_mask)
    gt_boundary = boundary_pixels(gt_mask)
    pred_count = int(pred_boundary.sum())
    gt_count = int(gt_boundary.sum())
    if pred_count == 0 and gt_count == 0:
        return 1.0

    if pred_count == 0 or gt_count == 0:
        return 0.0

    precision = (pred_boundary & within_tolerance(gt_boundary, tolerance)).sum() / pred_count
    recall = (gt_boundary & within_tolerance(pred_boundary, tolerance)).sum() / gt_count
    if precision + recall == 0:
        return 0.0

    return float(2 * precision * recall / (precision + recall))


def boundary_accuracy(
    pred: np.ndarray,
    gt: np.ndarray,
    num_labels: int,
    tolerance: int = DEFAULT_TOLERANCE,
    ignore_label: int = None,
    box_scores: np.ndarray = None,
) -> Tuple[np.ndarray, float]:
    """
    Per-class boundary F1 of one image and its mean over localized classes.

    Parameters
    ----------
    pred : np.ndarray
        The H×W predicted labels.

    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    tolerance : int (default=2)
        The Chebyshev tolerance τ in pixels.

    ignore_label : int, optional
        Ground truth pixels with this label belong to no class.

    box_scores : np.ndarray, optional
        Per-class box IoU from localization_accuracy; computed when not given.

    Returns
    -------
    tuple of (np.ndarray, float)
        Boundary F1 per class, NaN for classes that are not localized, and the mean over
        the scored classes.
    """
    if tolerance < 0 or int(tolerance) != tolerance:
        raise InvalidParameterError(f"Tolerance must be a non-negative integer, got {tolerance}.")

    pred, gt, valid = check_pair(pred, gt, num_labels, ignore_label)
    scores = np.full(num_labels, np.nan)
    for label in range(num_labels):
        pred_mask, gt_mask = class_masks(pred, gt, valid, label)
        biou = class_box_iou(pred_mask, gt_mask) if box_scores is None else box_scores[label]
        if np.isnan(biou) or biou < LOCALIZED_BIOU:
            continue

        scores[label] = boundary_f1(pred_mask, gt_mask, int(tolerance))

    mean = float(np.nanmean(scores)) if np.any(~np.isnan(scores)) else float("nan")

    return scores, mean
