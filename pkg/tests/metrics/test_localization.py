# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for box matching and localization accuracy.
"""

import numpy as np
import pytest

from triple_mrf.metrics.localization import (
    box_iou,
    class_box_iou,
    component_boxes,
    localization_accuracy,
    match_boxes,
)


def square(size, top, left, side, label=1):
    labels = np.zeros((size, size), dtype=int)
    labels[top : top + side, left : left + side] = label

    return labels


def test_component_boxes_use_four_connectivity():
    mask = np.array(
        [
            [1, 0, 0],
            [0, 1, 1],
            [0, 0, 0],
        ],
        dtype=bool,
    )

    assert component_boxes(mask) == [(0, 0, 0, 0), (1, 1, 1, 2)]


def test_box_iou_is_inclusive():
    assert box_iou((0, 0, 0, 0), (0, 0, 0, 0)) == 1.0
    assert box_iou((0, 0, 1, 1), (0, 0, 0, 1)) == 0.5
    assert box_iou((0, 0, 1, 1), (2, 2, 3, 3)) == 0.0


def test_nested_blob():
    gt = square(8, 2, 2, 4)
    pred = square(8, 3, 3, 2)

    scores, _ = localization_accuracy(pred, gt, 2)

    assert scores[1] == pytest.approx(0.25)
    assert scores[0] == 1.0


def test_one_prediction_for_two_blobs():
    gt = np.zeros((6, 8), dtype=int)
    gt[1:3, 1:3] = 1
    gt[1:3, 5:7] = 1
    pred = np.zeros((6, 8), dtype=int)
    pred[1:3, 1:3] = 1

    assert class_box_iou(pred == 1, gt == 1) == pytest.approx(0.5)


def test_matching_is_greedy_and_one_to_one():
    predicted = [(0, 0, 3, 3), (0, 0, 1, 1)]
    truth = [(0, 0, 1, 1), (0, 0, 3, 3)]

    assert match_boxes(predicted, truth) == [(0, 1, 1.0), (1, 0, 1.0)]


def test_disjoint_boxes_are_not_matched():
    assert match_boxes([(0, 0, 0, 0)], [(5, 5, 5, 5)]) == []
    assert class_box_iou(square(6, 0, 0, 1) == 1, square(6, 5, 5, 1) == 1) == 0.0


def test_class_without_components_is_nan():
    scores, mean = localization_accuracy(np.zeros((3, 3), dtype=int), np.zeros((3, 3), dtype=int), 2)

    assert scores[0] == 1.0
    assert np.isnan(scores[1])
    assert mean == 1.0


def test_ignored_pixels_split_nothing():
    gt = square(6, 1, 1, 3)
    gt[0, :] = 255
    pred = gt.copy()
    pred[0, :] = 1

    scores, _ = localization_accuracy(pred, gt, 2, ignore_label=255)

    assert scores[1] == 1.0
