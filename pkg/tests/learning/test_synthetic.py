# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for synthetic scenes.
"""

import numpy as np
import pytest

from triple_mrf.errors import ImpossibleSceneError, InvalidParameterError
from triple_mrf.learning.params import init_params
from triple_mrf.learning.synthetic import SceneSpec, gen_synthetic, read_scene_spec
from triple_mrf.learning.train import evaluate_corpus
from triple_mrf.metrics.report import evaluate_pairs


def test_same_seed_same_corpus():
    spec = SceneSpec(num_images=3, flip_rate=0.2, blur=0.5)

    first, second = gen_synthetic(spec, seed=9), gen_synthetic(spec, seed=9)

    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.unary.probabilities, b.unary.probabilities)
        np.testing.assert_array_equal(a.feats.intensity, b.feats.intensity)
        np.testing.assert_array_equal(a.labels, b.labels)

    different = gen_synthetic(spec, seed=10)[0]
    assert not np.array_equal(different.unary.probabilities, first[0].unary.probabilities)


def test_clean_unaries_recover_ground_truth():
    instances = gen_synthetic(SceneSpec(num_images=4, num_labels=4, confidence=0.7), seed=1)

    for instance in instances:
        np.testing.assert_array_equal(instance.unary.probabilities.argmax(axis=-1), instance.labels)
        assert instance.feats.is_integral
        assert instance.name.startswith("img_")


def test_flip_rate_one_never_favors_truth():
    instances = gen_synthetic(SceneSpec(num_images=2, flip_rate=1.0), seed=2)

    for instance in instances:
        assert not np.any(instance.unary.probabilities.argmax(axis=-1) == instance.labels)


def test_context_rules_place_partner_labels():
    spec = SceneSpec(
        num_images=1, height=20, width=20, objects=1, min_size=3, max_size=3, rules=((1, 2, 0, 3),)
    )

    for seed in range(10):
        labels = gen_synthetic(spec, seed=seed)[0].labels
        rows, cols = np.nonzero(labels == 1)
        if rows.size == 0:
            continue

        partner_cols = cols + 3
        inside = partner_cols < 20
        assert np.all(labels[rows[inside], partner_cols[inside]] == 2)


def test_potts_smoothing_restores_flipped_unaries():
    spec = SceneSpec(num_images=20, num_labels=2, objects=3, min_size=6, max_size=12, flip_rate=0.3)
    instances = gen_synthetic(spec, seed=3)
    params = init_params(2, context_size=3, window=3, omega1=0.0, omega2=0.2, kind="potts")

    def score(predictions):
        pairs = [(pred, instance.labels) for pred, instance in zip(predictions, instances)]
        return evaluate_pairs(pairs, 2).miou

    unary_only = score([instance.unary.probabilities.argmax(axis=-1) for instance in instances])
    _, refined = evaluate_corpus(instances, params)

    assert unary_only < 1.0
    assert score(refined) >= unary_only + 0.05


@pytest.mark.parametrize(
    "kwargs",
    [
        {"num_labels": 1},
        {"max_size": 40},
        {"min_size": 5, "max_size": 4},
        {"rules": ((0, 1, 0, 1),)},
        {"rules": ((1, 3, 0, 1),)},
    ],
)
def test_impossible_scenes(kwargs):
    with pytest.raises(ImpossibleSceneError):
        SceneSpec(**kwargs)


@pytest.mark.parametrize("kwargs", [{"flip_rate": 1.5}, {"confidence": 0.2}, {"blur": -1.0}])
def test_invalid_noise(kwargs):
    with pytest.raises(InvalidParameterError):
        SceneSpec(**kwargs)


def test_read_scene_spec(tmp_path):
    path = tmp_path / "scene.spec"
    path.write_text(
        "# two rectangles\n"
        "num-images = 5\n"
        "num_labels = 4\n"
        "flip_rate = 0.25\n"
        "rule = 1 2 0 4\n"
        "rule = 3 1 -2 0\n",
        encoding="utf-8",
    )

    spec = read_scene_spec(path)

    assert spec.num_images == 5
    assert spec.num_labels == 4
    assert spec.flip_rate == 0.25
    assert spec.rules == ((1, 2, 0, 4), (3, 1, -2, 0))


@pytest.mark.parametrize("text", ["colour = red\n", "rule = 1 2 3\n"])
def test_read_scene_spec_rejects_bad_lines(tmp_path, text):
    path = tmp_path / "scene.spec"
    path.write_text(text, encoding="utf-8")

    with pytest.raises(InvalidParameterError):
        read_scene_spec(path)
