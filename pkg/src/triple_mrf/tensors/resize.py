# SPDX-License-Identifier: GPL-3.0-or-later
"""
Corner-aligned bilinear resizing of H×W×C tensors.
"""

import numpy as np
from scipy import ndimage

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError


def _corner_aligned_coordinates(old_extent: int, new_extent: int) -> np.ndarray:
    if new_extent == 1 or old_extent == 1:
        return np.zeros(new_extent)

    return np.arange(new_extent) * ((old_extent - 1) / (new_extent - 1))


def bilinear_resize(tensor: np.ndarray, new_height: int, new_width: int) -> np.ndarray:
    """
    Resize every channel of an H×W×C tensor with bilinear interpolation.

    Output corners sample input corners exactly, so resizing to the same size is the
    identity and constant maps stay constant.

    Parameters
    ----------
    tensor : np.ndarray
        The H×W×C input.

    new_height : int
        Output rows, at least 1.

    new_width : int
        Output columns, at least 1.

    Returns
    -------
    np.ndarray
        The new_height×new_width×C result.
    """
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.ndim != 3:
        raise ShapeMismatchError(f"bilinear_resize expects H×W×C, got {tensor.shape}.")

    if new_height < 1 or new_width < 1:
        raise InvalidParameterError(
            f"Output size must be at least 1×1, got {new_height}×{new_width}."
        )

    height, width, channels = tensor.shape
    if (height, width) == (new_height, new_width):
        return tensor.copy()

    rows = _corner_aligned_coordinates(height, new_height)
    cols = _corner_aligned_coordinates(width, new_width)
    grid = np.meshgrid(rows, cols, indexing="ij")

    resized = np.empty((new_height, new_width, channels))
    for channel in range(channels):
        resized[:, :, channel] = ndimage.map_coordinates(
            tensor[:, :, channel], grid, order=1, mode="nearest"
        )

    return resized
