# SPDX-License-Identifier: GPL-3.0-or-later
"""
Pixelwise softmax loss against ground truth label maps.
"""

import numpy as np

from triple_mrf.errors import LabelRangeError, ShapeMismatchError
from triple_mrf.utils import EPSILON


def valid_pixels(gt: np.ndarray, num_labels: int, ignore_label: int = None) -> np.ndarray:
    """
    Mask of the pixels that count towards the loss, checking every other label's range.

    Parameters
    ----------
    gt : np.ndarray
        The H×W ground truth.

    num_labels : int
        The number of labels l.

    ignore_label : int, optional
        Pixels with this label are excluded.

    Returns
    -------
    np.ndarray
        A boolean H×W mask.
    """
    valid = np.ones(gt.shape, dtype=bool) if ignore_label is None else gt != ignore_label
    if np.any(gt[valid] < 0) or np.any(gt[valid] >= num_labels):
        raise LabelRangeError(f"Ground truth labels must lie in [0, {num_labels}).")

    return valid


def pixelwise_loss(o15: np.ndarray, gt: np.ndarray, ignore_label: int = None) -> float:
    """
    Mean of -ln o15(i, gt_i) over the pixels that are not ignored.

    Parameters
    ----------
    o15 : np.ndarray
        The H×W×l marginals.

    gt : np.ndarray
        The H×W ground truth.

    ignore_label : int, optional
        Pixels with this label are excluded.

    Returns
    -------
    float
        The loss; 0 when every pixel is ignored.
    """
    o15 = np.asarray(o15, dtype=np.float64)
    gt = np.asarray(gt)
    if o15.ndim != 3 or gt.shape != o15.shape[:2]:
        raise ShapeMismatchError(f"Ground truth {gt.shape} does not match marginals {o15.shape}.")

    valid = valid_pixels(gt, o15.shape[2], ignore_label)
    if not valid.any():
        return 0.0

    rows, cols = np.nonzero(valid)
    picked = o15[rows, cols, gt[rows, cols]]

    return float(-np.log(np.maximum(picked, EPSILON)).mean())
