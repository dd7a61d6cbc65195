# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for the pairwise models behind the mean field updates.
"""

import itertools

import numpy as np
import pytest

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.inference.pairwise import (
    CURRENT_Q,
    FIXED_UNARY,
    NO_KERNEL,
    CooccurrenceModel,
    DensePairwise,
    TriplePenaltyModel,
    check_kernel_source,
    pixel_distance_sum,
)
from triple_mrf.mrf.energy import neighborhood_distance_sum, triple_pairwise_energy
from triple_mrf.mrf.model import ContextFilterBank


def test_dense_pairwise_hand_table():
    # Two pixels in a row with two labels; only the edge between them costs.
    psi = np.zeros((1, 2, 1, 2, 2, 2))
    psi[0, 0, 0, 1] = [[0.0, 2.0], [2.0, 0.0]]
    psi[0, 1, 0, 0] = [[0.0, 2.0], [2.0, 0.0]]
    model = DensePairwise(psi)
    q = np.array([[[0.25, 0.75], [1.0, 0.0]]])

    penalty = model.penalty(q)

    np.testing.assert_allclose(penalty[0, 0], [0.0, 2.0])
    np.testing.assert_allclose(penalty[0, 1], [1.5, 0.5])
    np.testing.assert_allclose(model.pixel_penalty(q, 0, 1), penalty[0, 1])
    # Each unordered edge counted once: 0.75 * 1.0 * 2.
    assert model.pairwise_energy(q) == pytest.approx(1.5)


@pytest.mark.parametrize(
    "shape",
    [
        (2, 2, 2, 2, 2),
        (1, 2, 2, 1, 2, 2),
        (1, 2, 1, 2, 2, 3),
    ],
)
def test_dense_pairwise_rejects_bad_tables(shape):
    with pytest.raises(ShapeMismatchError):
        DensePairwise(np.zeros(shape))


def test_dense_pairwise_rejects_non_finite_costs():
    psi = np.zeros((1, 1, 1, 1, 2, 2))
    psi[0, 0, 0, 0, 0, 1] = np.inf

    with pytest.raises(InvalidParameterError):
        DensePairwise(psi)


def test_dense_pairwise_rejects_mismatched_marginals():
    model = DensePairwise(np.zeros((1, 2, 1, 2, 2, 2)))

    with pytest.raises(ShapeMismatchError):
        model.penalty(np.full((2, 1, 2), 0.5))


def test_check_kernel_source():
    assert check_kernel_source(NO_KERNEL) == NO_KERNEL
    with pytest.raises(InvalidParameterError):
        check_kernel_source("learned")

    with pytest.raises(InvalidParameterError):
        check_kernel_source(NO_KERNEL, (FIXED_UNARY, CURRENT_Q))


def test_pixel_distance_sum_matches_field_sum(make_model):
    model = make_model(np.random.default_rng(7), height=4, width=5)
    q = model.unary.probabilities
    sums = neighborhood_distance_sum(q, model.feats, model.dp, 3)

    for row, col in itertools.product(range(4), range(5)):
        np.testing.assert_allclose(
            pixel_distance_sum(q, model.feats, model.dp, 3, row, col), sums[row, col], rtol=1e-12
        )


@pytest.mark.parametrize("kernel_source", [FIXED_UNARY, CURRENT_Q, NO_KERNEL])
def test_cooccurrence_pixel_penalty_matches_field(make_model, kernel_source):
    rng = np.random.default_rng(11)
    model = make_model(rng)
    table = rng.normal(size=(3, 3))
    cooccurrence = CooccurrenceModel(table, model.unary, model.tw, model.feats, model.dp, kernel_source)
    q = rng.dirichlet(np.ones(3), size=(5, 4))

    penalty = cooccurrence.penalty(q)
    for row, col in itertools.product(range(5), range(4)):
        np.testing.assert_allclose(cooccurrence.pixel_penalty(q, row, col), penalty[row, col], rtol=1e-10)


def test_cooccurrence_rejects_wrong_table(make_model):
    model = make_model(np.random.default_rng(0))

    with pytest.raises(ShapeMismatchError):
        CooccurrenceModel(np.zeros((2, 3)), model.unary, model.tw, model.feats, model.dp)


@pytest.mark.parametrize("kernel_source", [FIXED_UNARY, CURRENT_Q])
def test_triple_pixel_penalty_matches_field(make_model, kernel_source):
    rng = np.random.default_rng(21)
    model = make_model(rng, num_components=3, context_size=5)
    triple = TriplePenaltyModel(model.unary, model.ctx, model.tw, model.feats, model.dp, kernel_source)
    q = rng.dirichlet(np.ones(3), size=(5, 4))

    penalty = triple.penalty(q)
    for row, col in itertools.product(range(5), range(4)):
        np.testing.assert_allclose(triple.pixel_penalty(q, row, col), penalty[row, col], rtol=1e-10)


def test_triple_penalty_takes_cheapest_component(make_model):
    model = make_model(np.random.default_rng(4), num_components=3)
    triple = TriplePenaltyModel(model.unary, model.ctx, model.tw, model.feats, model.dp)
    q = model.unary.probabilities

    np.testing.assert_array_equal(triple.penalty(q), triple.component_penalties(q).min(axis=2))


def test_triple_rejects_no_kernel(make_model):
    model = make_model(np.random.default_rng(0))

    with pytest.raises(InvalidParameterError):
        TriplePenaltyModel(model.unary, model.ctx, model.tw, model.feats, model.dp, NO_KERNEL)


def test_triple_pairwise_energy_delegates(make_model):
    model = make_model(np.random.default_rng(9))
    triple = TriplePenaltyModel(model.unary, model.ctx, model.tw, model.feats, model.dp)
    q = model.unary.probabilities

    assert triple.pairwise_energy(q) == triple_pairwise_energy(
        q, model.unary, model.ctx, model.tw, model.feats, model.dp
    )


def test_zero_context_has_no_penalty(make_model):
    model = make_model(np.random.default_rng(2))
    triple = TriplePenaltyModel(
        model.unary, ContextFilterBank(np.zeros_like(model.ctx.costs)), model.tw, model.feats, model.dp
    )

    assert not triple.penalty(model.unary.probabilities).any()
