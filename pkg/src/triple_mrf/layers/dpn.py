# SPDX-License-Identifier: GPL-3.0-or-later
"""
The smoothness head: context filtering, block min pooling and the unary combination.

Chained after the locally convolutional layer these compute one mean field iteration of
the triple penalty model as plain filtering operations.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
from scipy.special import softmax

from triple_mrf.errors import ShapeMismatchError
from triple_mrf.layers.kernels import build_triple_kernels, lconv_b12, padded_windows
from triple_mrf.layers.lut import lconv_b12_lut
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
    check_compatible,
)
from triple_mrf.tensors.dpt import write_tensor
from triple_mrf.utils import parallel_map

logger = logging.getLogger(__name__)

LAYER_NAMES = ("o11", "o12", "o13", "o14", "o15")

# MARK: Layers


def context_conv_b13(o12: np.ndarray, ctx: ContextFilterBank, threads: int = 1) -> np.ndarray:
    """
    Filter the triple penalty responses with every context component.

    Parameters
    ----------
    o12 : np.ndarray
        The H×W×l layer input.

    ctx : ContextFilterBank
        K·l filters of size n×n×l.

    threads : int (default=1)
        Worker threads over row bands of the output.

    Returns
    -------
    np.ndarray
        H×W×(l·K) penalties, channel u·K + k holding component k of label u. Borders are
        zero-padded.
    """
    o12 = np.asarray(o12, dtype=np.float64)
    if o12.ndim != 3 or o12.shape[2] != ctx.num_labels:
        raise ShapeMismatchError(
            f"Context filtering expects H×W×{ctx.num_labels} input, got {o12.shape}."
        )

    height, width, num_labels = o12.shape
    windows = padded_windows(o12, ctx.size)
    bands = np.array_split(np.arange(height), max(1, min(threads, height)))

    def filter_band(rows: np.ndarray) -> np.ndarray:
        return np.einsum("hwvyx,kuyxv->hwuk", windows[rows], ctx.costs)

    o13 = np.concatenate(parallel_map(filter_band, bands, threads), axis=0)

    return o13.reshape(height, width, num_labels * ctx.num_components)


def _label_blocks(o13: np.ndarray, num_components: int) -> np.ndarray:
    o13 = np.asarray(o13, dtype=np.float64)
    if o13.ndim != 3 or num_components < 1 or o13.shape[2] % num_components:
        raise ShapeMismatchError(
            f"Cannot pool {o13.shape[-1]} channels in blocks of {num_components}."
        )

    height, width, channels = o13.shape

    return o13.reshape(height, width, channels // num_components, num_components)


def block_min_b14(o13: np.ndarray, num_components: int) -> np.ndarray:
    """
    Keep the cheapest of the K context components of every label.

    Parameters
    ----------
    o13 : np.ndarray
        H×W×(l·K) penalties laid out in contiguous blocks of K channels.

    num_components : int
        The block size K.

    Returns
    -------
    np.ndarray
        The H×W×l minimum penalties.
    """
    return _label_blocks(o13, num_components).min(axis=-1)


def block_argmin_b14(o13: np.ndarray, num_components: int) -> np.ndarray:
    """
    The active component of every pixel and label; ties keep the lowest index.
    """
    return _label_blocks(o13, num_components).argmin(axis=-1)


def combine_b15(unary: UnaryField, o14: np.ndarray) -> np.ndarray:
    """
    Marginals o15 = softmax over labels of (ln p - o14).

    Parameters
    ----------
    unary : UnaryField
        The unary probabilities o11.

    o14 : np.ndarray
        The H×W×l pooled penalties.

    Returns
    -------
    np.ndarray
        The per-pixel normalized H×W×l output.
    """
    o14 = np.asarray(o14, dtype=np.float64)
    if o14.shape != unary.probabilities.shape:
        raise ShapeMismatchError(
            f"Penalties {o14.shape} do not match unary field {unary.probabilities.shape}."
        )

    # softmax subtracts the per-pixel max logit.
    return softmax(np.log(unary.probabilities) - o14, axis=-1)


# MARK: Forward


@dataclass(frozen=True, repr=False)
class LayerActivations:
    """
    Outputs of every layer of one forward pass.
    """

    o11: np.ndarray
    o12: np.ndarray
    o13: np.ndarray
    o14: np.ndarray
    o15: np.ndarray
    active_components: np.ndarray

    def items(self):
        return [(name, getattr(self, name)) for name in LAYER_NAMES]

    def __repr__(self) -> str:
        dims = ", ".join(f"{name}={list(value.shape)}" for name, value in self.items())
        return f"{self.__class__.__name__}({dims})"


def dpn_forward(
    unary: UnaryField,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
    ctx: ContextFilterBank,
    tw: TripleWindow,
    a: float = 1.0,
    b: float = 0.0,
    lut: bool = False,
    threads: int = 1,
) -> LayerActivations:
    """
    Run the smoothness head on a unary field.

    Parameters
    ----------
    unary : UnaryField
        The unary probabilities, also the layer input o11.

    feats : PixelFeatureGrid
        Intensities for the triple penalty kernels.

    dp : DistanceParams
        Distance weights.

    ctx : ContextFilterBank
        The context filters.

    tw : TripleWindow
        Extent of the locally convolutional kernels.

    a : float (default=1.0)
        Slope of the linear activation.

    b : float (default=0.0)
        Offset of the linear activation.

    lut : bool (default=False)
        Build the kernels through lookup tables; requires integral intensities.

    threads : int (default=1)
        Worker threads of the context filtering; the output does not depend on it.

    Returns
    -------
    LayerActivations
        Every layer output; o15 holds the refined marginals.
    """
    check_compatible(unary, feats, ctx)
    o11 = unary.probabilities

    if lut:
        o12 = lconv_b12_lut(o11, unary, feats, dp, tw, a, b)

    else:
        o12 = lconv_b12(o11, build_triple_kernels(unary, feats, dp, tw, a, b))

    o13 = context_conv_b13(o12, ctx, threads)
    o14 = block_min_b14(o13, ctx.num_components)
    o15 = combine_b15(unary, o14)

    return LayerActivations(
        o11=o11,
        o12=o12,
        o13=o13,
        o14=o14,
        o15=o15,
        active_components=block_argmin_b14(o13, ctx.num_components),
    )


def dump_activations(acts: LayerActivations, directory) -> Tuple[Path, ...]:
    """
    Write every layer output to ``<directory>/<layer>.dpt``.

    Parameters
    ----------
    acts : LayerActivations
        The activations of a forward pass.

    directory : str or Path
        The output directory, created if needed.

    Returns
    -------
    tuple of Path
        The written files in layer order.
    """
    directory = Path(directory)
    paths = []
    for name, value in acts.items():
        path = directory / f"{name}.dpt"
        write_tensor(value, path)
        paths.append(path)

    logger.info("Dumped %d layer activations to %s", len(paths), directory)

    return tuple(paths)
