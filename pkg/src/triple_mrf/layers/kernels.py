# SPDX-License-Identifier: GPL-3.0-or-later
"""
The locally convolutional triple penalty layer and its fixed per-position kernels.

Every position j and label v owns an m×m kernel with element d(j, z) p_j^v at the
offset of z; kernels are truncated at image borders.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.mrf.model import (
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
    check_compatible,
)

# MARK: Windows


def padded_windows(field: np.ndarray, size: int) -> np.ndarray:
    """
    Zero-padded size×size windows of every pixel of an H×W×C field.

    Parameters
    ----------
    field : np.ndarray
        The H×W×C field.

    size : int
        Odd window extent.

    Returns
    -------
    np.ndarray
        A read-only H×W×C×size×size view; window index (a, b) holds offset
        (a - size // 2, b - size // 2).
    """
    radius = size // 2
    padded = np.pad(field, ((radius, radius), (radius, radius), (0, 0)))

    return sliding_window_view(padded, (size, size), axis=(0, 1))


def in_bounds_mask(height: int, width: int, size: int) -> np.ndarray:
    """
    H×W×size×size mask of window offsets that land inside the image.
    """
    return padded_windows(np.ones((height, width, 1)), size)[:, :, 0] > 0


def spatial_offsets(size: int) -> np.ndarray:
    """
    The size×size table of squared offset lengths dy^2 + dx^2.
    """
    radius = size // 2
    steps = np.arange(-radius, radius + 1, dtype=np.float64)

    return steps[:, None] ** 2 + steps[None, :] ** 2


def distance_components(
    feats: PixelFeatureGrid, size: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    The intensity and spatial parts of d(j, z) for every position and window offset.

    Parameters
    ----------
    feats : PixelFeatureGrid
        The intensities.

    size : int
        Odd window extent m.

    Returns
    -------
    tuple of np.ndarray
        Two H×W×m×m arrays: sum over channels of (I_j - I_z)^2 and |pos_j - pos_z|^2,
        both zero for offsets outside the image.
    """
    height, width = feats.shape
    windows = padded_windows(feats.intensity, size)
    centres = feats.intensity[:, :, :, None, None]

    intensity = np.zeros((height, width, size, size))
    for channel in range(feats.intensity.shape[2]):
        diff = windows[:, :, channel] - centres[:, :, channel]
        intensity += diff * diff

    return masked_components(intensity, height, width, size)


def masked_components(
    intensity: np.ndarray, height: int, width: int, size: int
) -> Tuple[np.ndarray, np.ndarray]:
    mask = in_bounds_mask(height, width, size)
    spatial = np.broadcast_to(spatial_offsets(size), (height, width, size, size))

    return np.where(mask, intensity, 0.0), np.where(mask, spatial, 0.0)


def combine_distances(
    intensity: np.ndarray, spatial: np.ndarray, dp: DistanceParams
) -> np.ndarray:
    return dp.omega1 * intensity + dp.omega2 * spatial


# MARK: Kernel Field


@dataclass(frozen=True, repr=False)
class TriplePenaltyKernelField:
    """
    Fixed kernels of the locally convolutional layer plus its linear activation.

    Parameters
    ----------
    distances : np.ndarray
        H×W×m×m distances d(j, z), zero outside the image and at the centre.

    weights : np.ndarray
        H×W×l kernel factors p_j^v; the spatial part is shared by every label.

    a : float (default=1.0)
        Slope of the linear activation.

    b : float (default=0.0)
        Offset of the linear activation.
    """

    distances: np.ndarray
    weights: np.ndarray
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self) -> None:
        if self.distances.ndim != 4 or self.distances.shape[2] != self.distances.shape[3]:
            raise ShapeMismatchError(
                f"Kernel distances must be H×W×m×m, got {self.distances.shape}."
            )

        if self.weights.shape[:2] != self.distances.shape[:2]:
            raise ShapeMismatchError(
                f"Kernel weights {self.weights.shape} do not match distances "
                f"{self.distances.shape}."
            )

    @property
    def size(self) -> int:
        return self.distances.shape[2]

    @property
    def kernels(self) -> np.ndarray:
        """
        The H×W×l×m×m kernels d(j, z) p_j^v.
        """
        return self.distances[:, :, None] * self.weights[:, :, :, None, None]

    def __repr__(self) -> str:
        height, width, size, _ = self.distances.shape
        return (
            f"{self.__class__.__name__}(shape=({height}, {width}), "
            f"l={self.weights.shape[2]}, m={size}, a={self.a}, b={self.b})"
        )


def build_triple_kernels(
    unary: UnaryField,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
    tw: TripleWindow,
    a: float = 1.0,
    b: float = 0.0,
) -> TriplePenaltyKernelField:
    """
    Build the fixed kernels d(j, z) p_j^v of every position and label.

    Parameters
    ----------
    unary : UnaryField
        Supplies the factors p_j^v.

    feats : PixelFeatureGrid
        Intensities for the distance.

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
        The kernels with border offsets truncated to zero.
    """
    check_compatible(unary, feats)
    intensity, spatial = distance_components(feats, tw.size)

    return TriplePenaltyKernelField(
        combine_distances(intensity, spatial, dp), unary.probabilities, float(a), float(b)
    )


# MARK: Layer


def lconv_b12(q: np.ndarray, kernels: TriplePenaltyKernelField) -> np.ndarray:
    """
    Locally convolutional filtering o12(j, v) = a sum_z k_(j,v)(z) q_z^v + b.

    Parameters
    ----------
    q : np.ndarray
        The H×W×l marginals fed to the layer.

    kernels : TriplePenaltyKernelField
        The per-position kernels and activation.

    Returns
    -------
    np.ndarray
        The H×W×l output o12.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != kernels.weights.shape:
        raise ShapeMismatchError(
            f"Layer input {q.shape} does not match kernel field {kernels.weights.shape}."
        )

    filtered = np.einsum("hwvyx,hwvyx->hwv", kernels.kernels, padded_windows(q, kernels.size))

    return kernels.a * filtered + kernels.b


def require_integral(feats: PixelFeatureGrid) -> np.ndarray:
    """
    The intensities as integer indices, for table lookups.
    """
    if not feats.is_integral:
        raise InvalidParameterError(
            "Lookup-table filtering requires integral intensities in [0, 255]."
        )

    return feats.intensity.astype(np.intp)
