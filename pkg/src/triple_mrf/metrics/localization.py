# SPDX-License-Identifier: GPL-3.0-or-later
"""
Localization accuracy from bounding boxes of connected components.

Each 4-connected component of a class gets an inclusive bounding box. Predicted and
ground truth boxes are matched greedily by descending IoU, and unmatched boxes of either
side count as zero overlap.
"""

from typing import List, Tuple

import numpy as np
from scipy import ndimage

from triple_mrf.metrics.segmentation import check_pair, class_masks

Box = Tuple[int, int, int, int]

FOUR_CONNECTIVITY = ndimage.generate_binary_structure(2, 1)


def component_boxes(mask: np.ndarray) -> List[Box]:
    """
    Inclusive (top, left, bottom, right) boxes of the 4-connected components of a mask.
    """
    components, _ = ndimage.label(mask, structure=FOUR_CONNECTIVITY)

    return [
        (rows.start, cols.start, rows.stop - 1, cols.stop - 1)
        for rows, cols in ndimage.find_objects(components)
    ]


def box_iou(first: Box, second: Box) -> float:
    """
    Intersection-over-union of two inclusive boxes, counted in pixels.
    """
    top = max(first[0], second[0])
    left = max(first[1], second[1])
    bottom = min(first[2], second[2])
    right = min(first[3], second[3])
    overlap = max(0, bottom - top + 1) * max(0, right - left + 1)

    def area(box: Box) -> int:
        return (box[2] - box[0] + 1) * (box[3] - box[1] + 1)

    return overlap / (area(first) + area(second) - overlap)


def match_boxes(predicted: List[Box], truth: List[Box]) -> List[Tuple[int, int, float]]:
    """
    Greedy one-to-one matching of boxes with positive IoU, best pairs first.

    Ties keep the order of the predicted and then the ground truth boxes.

    Returns
    -------
    list of (int, int, float)
        Matched predicted index, ground truth index and their IoU.
    """
    candidates = [
        (box_iou(pred_box, gt_box), pred_index, gt_index)
        for pred_index, pred_box in enumerate(predicted)
        for gt_index, gt_box in enumerate(truth)
    ]
    candidates = sorted(
        (candidate for candidate in candidates if candidate[0] > 0),
        key=lambda candidate: (-candidate[0], candidate[1], candidate[2]),
    )

    used_pred, used_gt = set(), set()
    matches = []
    for iou, pred_index, gt_index in candidates:
        if pred_index in used_pred or gt_index in used_gt:
            continue

        used_pred.add(pred_index)
        used_gt.add(gt_index)
        matches.append((pred_index, gt_index, iou))

    return matches


def class_box_iou(pred_mask: np.ndarray, gt_mask: np.ndarray) -> float:
    """
    Box IoU of one class: matched IoU summed over matches plus unmatched boxes.

    NaN when neither mask has a component.
    """
    predicted = component_boxes(pred_mask)
    truth = component_boxes(gt_mask)
    if not predicted and not truth:
        return float("nan")

    matches = match_boxes(predicted, truth)
    unmatched = len(predicted) + len(truth) - 2 * len(matches)

    return sum(iou for _, _, iou in matches) / (len(matches) + unmatched)


def localization_accuracy(
    pred: np.ndarray, gt: np.ndarray, num_labels: int, ignore_label: int = None
) -> Tuple[np.ndarray, float]:
    """
    Per-class box IoU of one image and its mean.

    Parameters
    ----------
    pred : np.ndarray
        The H×W predicted labels.

    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    ignore_label : int, optional
        Ground truth pixels with this label belong to no component.

    Returns
    -------
    tuple of (np.ndarray, float)
        Box IoU per class, NaN for classes without components, and the mean over the
        other classes.
    """
    pred, gt, valid = check_pair(pred, gt, num_labels, ignore_label)
    scores = np.array(
        [class_box_iou(*class_masks(pred, gt, valid, label)) for label in range(num_labels)]
    )
    mean = float(np.nanmean(scores)) if np.any(~np.isnan(scores)) else float("nan")

    return scores, mean
