# SPDX-License-Identifier: GPL-3.0-or-later
"""
Synthetic scenes with planted label contexts and corrupted unaries.

Scenes are rectangles of foreground labels on background label 0. A context rule
(A, B, dy, dx) places a copy of every A rectangle shifted by (dy, dx) and painted B, so
B is always found at a fixed offset from A. Unaries start from the ground truth, flip
pixels to a wrong label at a given rate, spread a confidence over the labels and can be
blurred.
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Tuple

import numpy as np
from scipy import ndimage
from tqdm.auto import tqdm

from triple_mrf.errors import ImpossibleSceneError, InvalidParameterError
from triple_mrf.learning.corpus import Instance, instance_name
from triple_mrf.mrf.model import PixelFeatureGrid, UnaryField
from triple_mrf.utils import parse_key_values

logger = logging.getLogger(__name__)

ContextRule = Tuple[int, int, int, int]


@dataclass(frozen=True)
class SceneSpec:
    """
    Grammar of a synthetic corpus.

    Parameters
    ----------
    num_images : int (default=10)
        Number of scenes.

    height : int (default=32)
        Scene rows.

    width : int (default=32)
        Scene columns.

    num_labels : int (default=3)
        Number of labels l, background included.

    objects : int (default=2)
        Rectangles drawn per scene before context rules apply.

    min_size : int (default=4)
        Smallest rectangle side.

    max_size : int (default=10)
        Largest rectangle side.

    rules : tuple of (int, int, int, int)
        Context rules (A, B, dy, dx).

    intensity_noise : float (default=10.0)
        Standard deviation of the intensity noise.

    flip_rate : float (default=0.0)
        Probability that a pixel's unary favors a wrong label.

    confidence : float (default=0.8)
        Unary mass on the favored label; the rest is shared by the others.

    blur : float (default=0.0)
        Gaussian blur sigma of the unaries; 0 disables blurring.
    """

    num_images: int = 10
    height: int = 32
    width: int = 32
    num_labels: int = 3
    objects: int = 2
    min_size: int = 4
    max_size: int = 10
    rules: Tuple[ContextRule, ...] = field(default_factory=tuple)
    intensity_noise: float = 10.0
    flip_rate: float = 0.0
    confidence: float = 0.8
    blur: float = 0.0

    def __post_init__(self) -> None:
        if self.num_labels < 2:
            raise ImpossibleSceneError(f"Scenes need at least 2 labels, got {self.num_labels}.")

        if min(self.num_images, self.height, self.width, self.min_size) < 1 or self.objects < 0:
            raise ImpossibleSceneError("Counts and sizes of a scene must be positive.")

        if self.max_size < self.min_size or self.max_size > min(self.height, self.width):
            raise ImpossibleSceneError(
                f"Rectangle sides {self.min_size}..{self.max_size} do not fit a "
                f"{self.height}×{self.width} scene."
            )

        for source, target, _, _ in self.rules:
            if not (1 <= source < self.num_labels and 1 <= target < self.num_labels):
                raise ImpossibleSceneError(
                    f"Context rule labels {source}, {target} must be foreground labels in "
                    f"[1, {self.num_labels})."
                )

        if not 0.0 <= self.flip_rate <= 1.0:
            raise InvalidParameterError(f"Flip rate must lie in [0, 1], got {self.flip_rate}.")

        if not 1.0 / self.num_labels <= self.confidence <= 1.0:
            raise InvalidParameterError(
                f"Confidence must lie in [1/l, 1], got {self.confidence}."
            )

        if self.blur < 0 or self.intensity_noise < 0:
            raise InvalidParameterError("Blur and intensity noise must be non-negative.")

    @property
    def label_intensities(self) -> np.ndarray:
        """
        Mean intensity of each label, evenly spread over [0, 255].
        """
        return np.linspace(0.0, 255.0, self.num_labels)


def read_scene_spec(path) -> SceneSpec:
    """
    Read a SceneSpec from a key=value file.

    Keys are the SceneSpec field names; ``rule = A B dy dx`` may repeat.

    Parameters
    ----------
    path : str or Path
        The spec file.

    Returns
    -------
    SceneSpec
        The parsed grammar.
    """
    path = Path(path)
    rules = []
    lines = []
    with path.open(encoding="utf-8") as file:
        for line in file:
            stripped = line.strip()
            if stripped.startswith("rule") and "=" in stripped:
                values = stripped.split("=", 1)[1].split()
                if len(values) != 4:
                    raise InvalidParameterError(f"{path}: rules need 'A B dy dx', got '{stripped}'.")

                rules.append(tuple(int(value) for value in values))

            else:
                lines.append(line)

    types = {spec_field.name: spec_field.type for spec_field in fields(SceneSpec)}
    kwargs = {}
    for key, value in parse_key_values(lines, str(path)).items():
        key = key.replace("-", "_")
        if key not in types or key == "rules":
            raise InvalidParameterError(f"{path}: unknown scene key '{key}'.")

        kwargs[key] = float(value) if types[key] in (float, "float") else int(value)

    return SceneSpec(rules=tuple(rules), **kwargs)


# MARK: Scenes


def _draw_scene(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    labels = np.zeros((spec.height, spec.width), dtype=np.int64)
    for _ in range(spec.objects):
        label = int(rng.integers(1, spec.num_labels))
        rect_height = int(rng.integers(spec.min_size, spec.max_size + 1))
        rect_width = int(rng.integers(spec.min_size, spec.max_size + 1))
        top = int(rng.integers(0, spec.height - rect_height + 1))
        left = int(rng.integers(0, spec.width - rect_width + 1))
        labels[top : top + rect_height, left : left + rect_width] = label

        for source, target, dy, dx in spec.rules:
            if source != label:
                continue

            rows = slice(max(0, top + dy), max(0, min(spec.height, top + dy + rect_height)))
            cols = slice(max(0, left + dx), max(0, min(spec.width, left + dx + rect_width)))
            labels[rows, cols] = target

    return labels


def _corrupt_unary(labels: np.ndarray, spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    num_labels = spec.num_labels
    favored = labels.copy()

    flips = rng.random(labels.shape) < spec.flip_rate
    # Shifting by 1..l-1 always lands on a wrong label.
    shifts = rng.integers(1, num_labels, size=labels.shape)
    favored[flips] = (labels[flips] + shifts[flips]) % num_labels

    rest = (1.0 - spec.confidence) / (num_labels - 1)
    unary = np.full(labels.shape + (num_labels,), rest)
    np.put_along_axis(unary, favored[..., None], spec.confidence, axis=-1)

    if spec.blur > 0:
        unary = ndimage.gaussian_filter(unary, sigma=(spec.blur, spec.blur, 0), mode="nearest")

    return unary / unary.sum(axis=-1, keepdims=True)


def gen_synthetic(spec: SceneSpec, seed: int = 0, verbose: bool = False) -> List[Instance]:
    """
    Generate a deterministic synthetic corpus.

    Parameters
    ----------
    spec : SceneSpec
        The scene grammar.

    seed : int (default=0)
        Seed of every random draw; equal seeds give bitwise equal corpora.

    verbose : bool (default=False)
        Show a progress bar.

    Returns
    -------
    list of Instance
        Unaries, integer intensity features and ground truth of each scene.
    """
    rng = np.random.default_rng(seed)
    intensities = spec.label_intensities

    instances = []
    for index in tqdm(range(spec.num_images), desc="Generating scenes", unit="scene", disable=not verbose):
        labels = _draw_scene(spec, rng)

        noise = rng.normal(0.0, spec.intensity_noise, size=labels.shape)
        intensity = np.clip(np.round(intensities[labels] + noise), 0, 255)

        unary = _corrupt_unary(labels, spec, rng)
        instances.append(
            Instance(UnaryField(unary), PixelFeatureGrid(intensity), labels, instance_name(index))
        )

    logger.debug("Generated %d scenes with seed %d", len(instances), seed)

    return instances
