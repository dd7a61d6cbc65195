# SPDX-License-Identifier: GPL-3.0-or-later
"""
Training instances and their on-disk corpus layout.

A corpus directory holds ``unary/``, ``features/`` and ``labels/`` with one DPT file per
image under the same name in each.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np
from tqdm.auto import tqdm

from triple_mrf.errors import LabelRangeError, ShapeMismatchError
from triple_mrf.mrf.model import PixelFeatureGrid, UnaryField, check_compatible
from triple_mrf.tensors.dpt import read_label_map, read_tensor, write_label_map, write_tensor

logger = logging.getLogger(__name__)

UNARY_DIR = "unary"
FEATURES_DIR = "features"
LABELS_DIR = "labels"


@dataclass(frozen=True, repr=False)
class Instance:
    """
    One image: unary probabilities, pixel features and the ground truth labeling.
    """

    unary: UnaryField
    feats: PixelFeatureGrid
    labels: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        check_compatible(self.unary, self.feats)
        labels = np.array(self.labels, dtype=np.int64)
        if labels.shape != tuple(self.unary.shape):
            raise ShapeMismatchError(
                f"Labels {labels.shape} do not match unary field {tuple(self.unary.shape)}."
            )

        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r}, shape={tuple(self.unary.shape)})"


def instance_name(index: int) -> str:
    return f"img_{index:04d}"


def save_corpus(instances: List[Instance], directory, verbose: bool = False) -> Path:
    """
    Write instances to a corpus directory.

    Parameters
    ----------
    instances : list of Instance
        The images to write; unnamed instances are numbered.

    directory : str or Path
        The corpus root.

    verbose : bool (default=False)
        Show a progress bar.

    Returns
    -------
    Path
        The corpus root.
    """
    directory = Path(directory)
    for index, instance in enumerate(
        tqdm(instances, desc="Writing corpus", unit="image", disable=not verbose)
    ):
        name = instance.name or instance_name(index)
        write_tensor(instance.unary.probabilities, directory / UNARY_DIR / f"{name}.dpt")
        write_tensor(instance.feats.intensity, directory / FEATURES_DIR / f"{name}.dpt")
        write_label_map(instance.labels, directory / LABELS_DIR / f"{name}.dpt")

    logger.info("Wrote %d instances to %s", len(instances), directory)

    return directory


def load_corpus(
    directory, num_labels: int = None, ignore_label: int = None, verbose: bool = False
) -> List[Instance]:
    """
    Read every instance of a corpus directory in file name order.

    Parameters
    ----------
    directory : str or Path
        The corpus root.

    num_labels : int, optional
        When given, unaries must use exactly this many labels.

    ignore_label : int, optional
        A label value allowed in ground truth besides [0, l).

    verbose : bool (default=False)
        Show a progress bar.

    Returns
    -------
    list of Instance
        The instances.

    Raises
    ------
    FileNotFoundError
        If the corpus has no unary files or a companion file is missing.
    """
    directory = Path(directory)
    unary_paths = sorted((directory / UNARY_DIR).glob("*.dpt"))
    if not unary_paths:
        raise FileNotFoundError(f"No unary tensors found in {directory / UNARY_DIR}.")

    instances = []
    for unary_path in tqdm(unary_paths, desc="Reading corpus", unit="image", disable=not verbose):
        unary = UnaryField(read_tensor(unary_path))
        if num_labels is not None and unary.num_labels != num_labels:
            raise ShapeMismatchError(
                f"{unary_path} has {unary.num_labels} labels, expected {num_labels}."
            )

        feats = PixelFeatureGrid(read_tensor(directory / FEATURES_DIR / unary_path.name))
        labels = read_label_map(directory / LABELS_DIR / unary_path.name)
        valid = (labels < unary.num_labels) | (labels == ignore_label)
        if not np.all(valid):
            raise LabelRangeError(
                f"{unary_path.name}: labels must lie in [0, {unary.num_labels}) or equal the "
                f"ignore label {ignore_label}."
            )

        instances.append(Instance(unary, feats, labels, unary_path.stem))

    return instances
