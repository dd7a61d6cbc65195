# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for the summaries of learned contexts.
"""

import numpy as np

from triple_mrf.layers.context import dominant_offsets, label_compatibility
from triple_mrf.mrf.model import ContextFilterBank


def test_label_compatibility_sums_offsets():
    costs = np.zeros((1, 2, 3, 3, 2))
    costs[0, 0, :, :, 1] = 1.0
    costs[0, 1, 1, 1, 0] = -2.0

    table = label_compatibility(ContextFilterBank(costs))

    np.testing.assert_array_equal(table, [[[0.0, 9.0], [-2.0, 0.0]]])


def test_dominant_offsets():
    costs = np.zeros((2, 2, 3, 3, 2))
    costs[0, 1, 0, 2, 0] = -1.0
    costs[1, 0, 2, 1, 1] = -3.0

    offsets = dominant_offsets(ContextFilterBank(costs))

    assert offsets.shape == (2, 2, 2, 2)
    np.testing.assert_array_equal(offsets[0, 1, 0], [-1, 1])
    np.testing.assert_array_equal(offsets[1, 0, 1], [1, 0])
    # All-zero costs tie; the first offset in raster order wins.
    np.testing.assert_array_equal(offsets[0, 0, 0], [-1, -1])
