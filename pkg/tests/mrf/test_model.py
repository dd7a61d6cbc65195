# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for the MRF domain types.
"""

import unittest

import numpy as np
import pytest

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    LabelSpace,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
    check_compatible,
)
from triple_mrf.utils import EPSILON


class TestUnaryField(unittest.TestCase):
    def test_normalized_input_unchanged(self):
        probabilities = np.array([[[0.2, 0.8], [0.5, 0.5]]])
        np.testing.assert_allclose(UnaryField(probabilities).probabilities, probabilities)

    def test_sums_of_two_are_halved(self):
        unary = UnaryField(np.array([[[1.0, 1.0], [0.5, 1.5]]]))
        np.testing.assert_allclose(unary.probabilities, [[[0.5, 0.5], [0.25, 0.75]]])

    def test_zero_is_clamped(self):
        unary = UnaryField(np.array([[[0.0, 1.0]]]))

        self.assertGreater(unary.probabilities[0, 0, 0], 0.0)
        self.assertAlmostEqual(unary.probabilities[0, 0, 0], EPSILON, delta=1e-15)
        self.assertTrue(np.isfinite(unary.potentials).all())

    def test_read_only(self):
        unary = UnaryField(np.full((2, 2, 2), 0.5))
        with self.assertRaises(ValueError):
            unary.probabilities[0, 0, 0] = 1.0

    def test_rejects_bad_values(self):
        with self.assertRaises(InvalidParameterError):
            UnaryField(np.array([[[-0.1, 1.1]]]))

        with self.assertRaises(InvalidParameterError):
            UnaryField(np.array([[[1.0]]]))

        with self.assertRaises(ShapeMismatchError):
            UnaryField(np.ones((2, 2)))


class TestContextFilterBank(unittest.TestCase):
    def test_tensor_layout_is_component_major(self):
        costs = np.arange(2 * 3 * 3 * 3 * 3, dtype=float).reshape(2, 3, 3, 3, 3)
        bank = ContextFilterBank(costs)
        tensor = bank.to_tensor()

        self.assertEqual(tensor.shape, (6, 3, 3, 3))
        np.testing.assert_array_equal(tensor[1 * 3 + 2], costs[1, 2])
        np.testing.assert_array_equal(ContextFilterBank.from_tensor(tensor, 2).costs, costs)

    def test_rejects_even_and_ragged_banks(self):
        with self.assertRaises(InvalidParameterError):
            ContextFilterBank.zeros(1, 2, 4)

        with self.assertRaises(ShapeMismatchError):
            ContextFilterBank(np.zeros((1, 2, 3, 3, 3)))

        with self.assertRaises(ShapeMismatchError):
            ContextFilterBank.from_tensor(np.zeros((5, 3, 3, 2)), 2)

    def test_negative_costs_allowed(self):
        bank = ContextFilterBank(-np.ones((1, 2, 1, 1, 2)))
        self.assertEqual(bank.costs.min(), -1.0)


# MARK: Validation


@pytest.mark.parametrize("num_labels", [0, 1])
def test_label_space_needs_two_labels(num_labels):
    with pytest.raises(InvalidParameterError):
        LabelSpace(num_labels)


@pytest.mark.parametrize("omega1, omega2", [(-1.0, 0.0), (0.0, -0.5), (np.inf, 1.0), (np.nan, 1.0)])
def test_distance_params_reject_bad_weights(omega1, omega2):
    with pytest.raises(InvalidParameterError):
        DistanceParams(omega1, omega2)


@pytest.mark.parametrize("size", [0, 2, 50, -3])
def test_triple_window_must_be_odd(size):
    with pytest.raises(InvalidParameterError):
        TripleWindow(size)


def test_features_range():
    with pytest.raises(InvalidParameterError):
        PixelFeatureGrid(np.full((2, 2), 256.0))

    grid = PixelFeatureGrid(np.full((2, 3), 7.0))
    assert grid.intensity.shape == (2, 3, 1)
    assert grid.is_integral
    assert not PixelFeatureGrid(np.full((2, 3), 7.5)).is_integral


def test_check_compatible():
    unary = UnaryField(np.full((2, 3, 2), 0.5))

    check_compatible(unary, PixelFeatureGrid(np.zeros((2, 3))), ContextFilterBank.zeros(1, 2, 3))

    with pytest.raises(ShapeMismatchError):
        check_compatible(unary, PixelFeatureGrid(np.zeros((3, 2))))

    with pytest.raises(ShapeMismatchError):
        check_compatible(unary, ctx=ContextFilterBank.zeros(1, 3, 3))
