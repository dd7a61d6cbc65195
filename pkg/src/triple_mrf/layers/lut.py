# SPDX-License-Identifier: GPL-3.0-or-later
"""
Lookup-table construction of the triple penalty kernels.

Squared intensity differences come from one 256×256 table shared by every channel and
squared offset lengths from a precomputed m×m table, so no per-pixel arithmetic is left
besides the two weighted sums. The filtering step is the same as the direct path.
"""

from functools import lru_cache

import numpy as np

from triple_mrf.layers.kernels import (
    TriplePenaltyKernelField,
    combine_distances,
    lconv_b12,
    masked_components,
    padded_windows,
    require_integral,
)
from triple_mrf.mrf.model import (
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
    check_compatible,
)

INTENSITY_LEVELS = 256


@lru_cache(maxsize=1)
def distance_lut() -> np.ndarray:
    """
    The read-only 256×256 table of squared differences (a - b)^2.
    """
    levels = np.arange(INTENSITY_LEVELS, dtype=np.float64)
    table = (levels[:, None] - levels[None, :]) ** 2
    table.setflags(write=False)

    return table


def build_triple_kernels_lut(
    unary: UnaryField,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
    tw: TripleWindow,
    a: float = 1.0,
    b: float = 0.0,
) -> TriplePenaltyKernelField:
    """
    Build the triple penalty kernels through table lookups.

    Parameters
    ----------
    unary : UnaryField
        Supplies the factors p_j^v.

    feats : PixelFeatureGrid
        Integral intensities used as table indices.

    dp : DistanceParams
        Distance weights.

    tw : TripleWindow
        The kernel extent m.

    a : float (default=1.0)
        Slope of the linear activation.

    b : float (default=0.0)
        Offset of the linear activation.

    Returns
    -------
    TriplePenaltyKernelField
        Kernels equal bit for bit to build_triple_kernels on the same inputs.
    """
    check_compatible(unary, feats)
    indices = require_integral(feats)
    height, width = feats.shape
    table = distance_lut()

    windows = padded_windows(indices, tw.size)
    intensity = np.zeros((height, width, tw.size, tw.size))
    for channel in range(indices.shape[2]):
        intensity += table[indices[:, :, channel, None, None], windows[:, :, channel]]

    intensity, spatial = masked_components(intensity, height, width, tw.size)

    return TriplePenaltyKernelField(
        combine_distances(intensity, spatial, dp), unary.probabilities, float(a), float(b)
    )


def lconv_b12_lut(
    q: np.ndarray,
    unary: UnaryField,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
    tw: TripleWindow,
    a: float = 1.0,
    b: float = 0.0,
) -> np.ndarray:
    """
    The locally convolutional layer with kernels assembled from lookup tables.

    Parameters
    ----------
    q : np.ndarray
        The H×W×l layer input.

    unary : UnaryField
        Supplies the factors p_j^v.

    feats : PixelFeatureGrid
        Integral intensities.

    dp : DistanceParams
        Distance weights.

    tw : TripleWindow
        The kernel extent m.

    a : float (default=1.0)
        Slope of the linear activation.

    b : float (default=0.0)
        Offset of the linear activation.

    Returns
    -------
    np.ndarray
        The H×W×l output o12.
    """
    return lconv_b12(q, build_triple_kernels_lut(unary, feats, dp, tw, a, b))
