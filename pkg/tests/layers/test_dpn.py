# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for the smoothness head and its agreement with the mean field oracle.
"""

import numpy as np
import pytest

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.inference.meanfield import mf_init, mf_update_triple
from triple_mrf.layers.dpn import (
    LAYER_NAMES,
    block_argmin_b14,
    block_min_b14,
    combine_b15,
    context_conv_b13,
    dpn_forward,
    dump_activations,
)
from triple_mrf.mrf.model import ContextFilterBank, PixelFeatureGrid, UnaryField
from triple_mrf.tensors.dpt import read_tensor

# MARK: Context Filtering


def test_centre_identity_bank_copies_input():
    rng = np.random.default_rng(0)
    o12 = rng.normal(size=(4, 5, 3))
    costs = np.zeros((1, 3, 1, 1, 3))
    costs[0, :, 0, 0, :] = np.eye(3)

    np.testing.assert_allclose(context_conv_b13(o12, ContextFilterBank(costs)), o12)


def test_zero_bank_gives_zero_penalties():
    o12 = np.random.default_rng(1).normal(size=(3, 3, 2))

    o13 = context_conv_b13(o12, ContextFilterBank.zeros(4, 2, 5))

    assert o13.shape == (3, 3, 8)
    assert not o13.any()


def test_context_channel_layout():
    o12 = np.zeros((1, 3, 2))
    o12[0, 2, 1] = 1.0
    costs = np.zeros((2, 2, 3, 3, 2))
    # Component 1 of label 0 reads label 1 at offset (0, +1).
    costs[1, 0, 1, 2, 1] = 5.0
    ctx = ContextFilterBank(costs)

    o13 = context_conv_b13(o12, ctx)

    # Channel u·K + k.
    assert o13[0, 1, 0 * 2 + 1] == 5.0
    assert o13.sum() == 5.0


@pytest.mark.parametrize("threads", [2, 3, 40])
def test_context_row_bands_match_single_thread(threads):
    rng = np.random.default_rng(21)
    o12 = rng.random((7, 5, 3))
    ctx = ContextFilterBank(rng.normal(size=(2, 3, 5, 5, 3)))

    np.testing.assert_allclose(
        context_conv_b13(o12, ctx, threads=threads), context_conv_b13(o12, ctx), rtol=1e-12
    )


def test_context_rejects_wrong_channels():
    with pytest.raises(ShapeMismatchError):
        context_conv_b13(np.zeros((2, 2, 3)), ContextFilterBank.zeros(1, 2, 3))


# MARK: Pooling


def test_block_min_example():
    o13 = np.array([[[3.0, -1.0, 2.0]]])

    np.testing.assert_array_equal(block_min_b14(o13, 3), [[[-1.0]]])
    np.testing.assert_array_equal(block_argmin_b14(o13, 3), [[[1]]])


def test_block_min_channel_count():
    o13 = np.random.default_rng(2).normal(size=(4, 4, 105))

    assert block_min_b14(o13, 5).shape == (4, 4, 21)


def test_block_argmin_keeps_lowest_index_on_ties():
    np.testing.assert_array_equal(block_argmin_b14(np.array([[[1.0, 1.0]]]), 2), [[[0]]])


@pytest.mark.parametrize("num_components", [0, 4])
def test_block_min_rejects_ragged_blocks(num_components):
    with pytest.raises(ShapeMismatchError):
        block_min_b14(np.zeros((2, 2, 6)), num_components)


# MARK: Combination


def test_combine_example():
    unary = UnaryField(np.full((1, 1, 2), 0.5))

    o15 = combine_b15(unary, np.array([[[0.0, np.log(2.0)]]]))

    np.testing.assert_allclose(o15, [[[2 / 3, 1 / 3]]])


def test_combine_is_shift_invariant():
    rng = np.random.default_rng(3)
    unary = UnaryField(rng.dirichlet(np.ones(4), size=(3, 3)))
    o14 = rng.normal(size=(3, 3, 4))

    np.testing.assert_allclose(combine_b15(unary, o14 + 7.5), combine_b15(unary, o14), rtol=1e-12)


def test_combine_handles_large_penalties():
    unary = UnaryField(np.full((1, 1, 2), 0.5))

    o15 = combine_b15(unary, np.array([[[1e4, 0.0]]]))

    np.testing.assert_allclose(o15, [[[0.0, 1.0]]], atol=1e-300)


def test_combine_rejects_mismatch():
    with pytest.raises(ShapeMismatchError):
        combine_b15(UnaryField(np.full((1, 1, 2), 0.5)), np.zeros((1, 1, 3)))


# MARK: Forward


@pytest.mark.parametrize("seed", range(200))
def test_forward_matches_mean_field(make_model, seed):
    rng = np.random.default_rng(seed)
    model = make_model(
        rng,
        height=int(rng.integers(4, 17)),
        width=int(rng.integers(4, 17)),
        num_labels=int(rng.integers(2, 5)),
        num_components=int(rng.integers(1, 4)),
        window=int(rng.choice([1, 3, 5, 7])),
        context_size=int(rng.choice([1, 3, 5, 7])),
    )

    acts = dpn_forward(model.unary, model.feats, model.dp, model.ctx, model.tw)
    expected = mf_update_triple(
        mf_init(model.unary), model.unary, model.ctx, model.tw, model.feats, model.dp
    )

    np.testing.assert_allclose(acts.o15, expected, rtol=0, atol=1e-9)


def test_forward_lut_matches_direct(make_model):
    model = make_model(np.random.default_rng(4), height=8, width=8)
    args = (model.unary, model.feats, model.dp, model.ctx, model.tw)

    direct = dpn_forward(*args)
    lookup = dpn_forward(*args, lut=True)

    for (name, value), (_, expected) in zip(lookup.items(), direct.items()):
        np.testing.assert_array_equal(value, expected, err_msg=name)


def test_forward_threads_keep_outputs(make_model):
    model = make_model(np.random.default_rng(8), height=9, width=6, num_components=2)
    args = (model.unary, model.feats, model.dp, model.ctx, model.tw)

    single = dpn_forward(*args)
    pooled = dpn_forward(*args, threads=4)

    np.testing.assert_allclose(pooled.o13, single.o13, rtol=1e-12)
    np.testing.assert_allclose(pooled.o15, single.o15, rtol=1e-12)


def test_forward_lut_rejects_fractional_features(make_model):
    model = make_model(np.random.default_rng(5))
    feats = PixelFeatureGrid(np.minimum(model.feats.intensity, 254.0) + 0.25)

    with pytest.raises(InvalidParameterError):
        dpn_forward(model.unary, feats, model.dp, model.ctx, model.tw, lut=True)


def test_forward_activation_shapes(make_model):
    model = make_model(np.random.default_rng(6), num_components=3)

    acts = dpn_forward(model.unary, model.feats, model.dp, model.ctx, model.tw)

    assert acts.o12.shape == (5, 4, 3)
    assert acts.o13.shape == (5, 4, 9)
    assert acts.o14.shape == (5, 4, 3)
    assert acts.active_components.shape == (5, 4, 3)
    np.testing.assert_allclose(acts.o15.sum(axis=-1), 1.0)
    assert repr(acts).startswith("LayerActivations(o11=[5, 4, 3]")


def test_dump_activations(make_model, tmp_path):
    model = make_model(np.random.default_rng(7))
    acts = dpn_forward(model.unary, model.feats, model.dp, model.ctx, model.tw)

    paths = dump_activations(acts, tmp_path / "acts")

    assert [path.name for path in paths] == [f"{name}.dpt" for name in LAYER_NAMES]
    for path, (_, value) in zip(paths, acts.items()):
        np.testing.assert_array_equal(read_tensor(path), value)
