# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for corpus directories.
"""

import numpy as np
import pytest

from triple_mrf.errors import LabelRangeError, ShapeMismatchError
from triple_mrf.learning.corpus import LABELS_DIR, Instance, load_corpus, save_corpus
from triple_mrf.learning.synthetic import SceneSpec, gen_synthetic
from triple_mrf.mrf.model import PixelFeatureGrid, UnaryField
from triple_mrf.tensors.dpt import write_label_map


def test_corpus_round_trip(tmp_path):
    instances = gen_synthetic(SceneSpec(num_images=3, height=8, width=9, max_size=4), seed=0)

    save_corpus(instances, tmp_path)
    loaded = load_corpus(tmp_path, num_labels=3)

    assert [instance.name for instance in loaded] == ["img_0000", "img_0001", "img_0002"]
    for original, instance in zip(instances, loaded):
        np.testing.assert_array_equal(instance.unary.probabilities, original.unary.probabilities)
        np.testing.assert_array_equal(instance.feats.intensity, original.feats.intensity)
        np.testing.assert_array_equal(instance.labels, original.labels)


def test_load_corpus_checks_labels(tmp_path):
    instances = gen_synthetic(SceneSpec(num_images=1, height=6, width=6, max_size=3), seed=0)
    save_corpus(instances, tmp_path)

    with pytest.raises(ShapeMismatchError):
        load_corpus(tmp_path, num_labels=4)

    labels = instances[0].labels.copy()
    labels[0, 0] = 255
    write_label_map(labels, tmp_path / LABELS_DIR / "img_0000.dpt")

    with pytest.raises(LabelRangeError):
        load_corpus(tmp_path)

    assert load_corpus(tmp_path, ignore_label=255)[0].labels[0, 0] == 255


def test_load_corpus_requires_unaries(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path)


def test_instance_shape_check():
    with pytest.raises(ShapeMismatchError):
        Instance(UnaryField(np.full((2, 2, 2), 0.5)), PixelFeatureGrid(np.zeros((2, 2))), np.zeros((3, 2)))
