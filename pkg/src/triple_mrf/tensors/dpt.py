# SPDX-License-Identifier: GPL-3.0-or-later
"""
Reading and writing tensors and label maps in the DPT container.

Layout: the magic ``DPT1`` and four zero bytes, the rank as an unsigned byte, one
unsigned 32-bit little-endian extent per axis, then the payload as little-endian
float64 values in row-major order.
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from triple_mrf.errors import (
    BadMagicError,
    InvalidParameterError,
    LabelRangeError,
    NonFiniteValueError,
    NonIntegralLabelError,
    PayloadMismatchError,
    UnsupportedRankError,
)

logger = logging.getLogger(__name__)

DPT_MAGIC = b"DPT1\x00\x00\x00\x00"
MAX_RANK = 4
PAYLOAD_DTYPE = np.dtype("<f8")

PathLike = Union[str, Path]

# MARK: Validate


def as_tensor(values) -> np.ndarray:
    """
    Validate and convert values to a DPT-compatible float64 array.

    Parameters
    ----------
    values : array_like
        The tensor values, rank 1 to 4.

    Returns
    -------
    np.ndarray
        A C-contiguous float64 array.

    Raises
    ------
    UnsupportedRankError
        If the rank is 0 or greater than 4.

    InvalidParameterError
        If any extent is zero.
    """
    tensor = np.ascontiguousarray(values, dtype=np.float64)

    if not 1 <= tensor.ndim <= MAX_RANK:
        raise UnsupportedRankError(
            f"Tensors must have rank 1 to {MAX_RANK}, got rank {tensor.ndim}."
        )

    if any(extent < 1 for extent in tensor.shape):
        raise InvalidParameterError(
            f"Every tensor extent must be at least 1, got dims {list(tensor.shape)}."
        )

    return tensor


# MARK: Tensors


def write_tensor(tensor, path: PathLike) -> None:
    """
    Write a tensor to a DPT file.

    Parameters
    ----------
    tensor : array_like
        The tensor to write.

    path : str or Path
        The destination file; parent directories are created.

    Raises
    ------
    NonFiniteValueError
        If the tensor contains NaN or infinite values.
    """
    tensor = as_tensor(tensor)
    if not np.all(np.isfinite(tensor)):
        raise NonFiniteValueError("Refusing to write a tensor with non-finite values.", path)

    header = DPT_MAGIC + struct.pack("<B", tensor.ndim)
    header += struct.pack(f"<{tensor.ndim}I", *tensor.shape)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as out_stream:
        out_stream.write(header)
        out_stream.write(tensor.astype(PAYLOAD_DTYPE, copy=False).tobytes(order="C"))

    logger.debug("Wrote tensor %s to %s", list(tensor.shape), path)


def read_tensor(path: PathLike) -> np.ndarray:
    """
    Read a tensor from a DPT file.

    Parameters
    ----------
    path : str or Path
        The file to read.

    Returns
    -------
    np.ndarray
        A float64 array with exactly the dims stored in the header.

    Raises
    ------
    BadMagicError
        If the file does not start with the DPT magic.

    UnsupportedRankError
        If the stored rank is outside 1 to 4 or an extent is zero.

    PayloadMismatchError
        If the payload length disagrees with the header dims.

    NonFiniteValueError
        If the payload holds NaN or infinite values.
    """
    path = Path(path)
    raw = path.read_bytes()

    if raw[: len(DPT_MAGIC)] != DPT_MAGIC:
        raise BadMagicError("File does not start with the DPT1 magic.", path)

    offset = len(DPT_MAGIC)
    if len(raw) < offset + 1:
        raise PayloadMismatchError("payload mismatch: header is truncated.", path)

    (rank,) = struct.unpack_from("<B", raw, offset)
    offset += 1
    if not 1 <= rank <= MAX_RANK:
        raise UnsupportedRankError(f"Unsupported rank {rank}.", path)

    if len(raw) < offset + 4 * rank:
        raise PayloadMismatchError("payload mismatch: header is truncated.", path)

    dims = struct.unpack_from(f"<{rank}I", raw, offset)
    offset += 4 * rank
    if any(extent < 1 for extent in dims):
        raise UnsupportedRankError(f"Zero extent in dims {list(dims)}.", path)

    expected = int(np.prod(dims)) * PAYLOAD_DTYPE.itemsize
    if len(raw) - offset != expected:
        raise PayloadMismatchError(
            f"payload mismatch: dims {list(dims)} need {expected} bytes, found {len(raw) - offset}.",
            path,
        )

    tensor = np.frombuffer(raw, dtype=PAYLOAD_DTYPE, offset=offset).reshape(dims)
    if not np.all(np.isfinite(tensor)):
        raise NonFiniteValueError("Payload contains non-finite values.", path)

    return tensor.astype(np.float64)


# MARK: Label Maps


def write_label_map(labels, path: PathLike) -> None:
    """
    Write an H×W label map as a DPT tensor with dims [H, W, 1].

    Parameters
    ----------
    labels : array_like
        Integer label indices.

    path : str or Path
        The destination file.
    """
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise InvalidParameterError(f"Label maps are H×W, got shape {labels.shape}.")

    write_tensor(labels.astype(np.float64)[:, :, None], path)


def read_label_map(path: PathLike, num_labels: int = None) -> np.ndarray:
    """
    Read a label map stored as a DPT tensor with dims [H, W, 1].

    Parameters
    ----------
    path : str or Path
        The file to read.

    num_labels : int, optional
        When given, every label must lie in [0, num_labels).

    Returns
    -------
    np.ndarray
        An H×W int64 array.

    Raises
    ------
    NonIntegralLabelError
        If the container is not H×W×1 or holds non-integral values.

    LabelRangeError
        If a label is negative or not below num_labels.
    """
    tensor = read_tensor(path)
    if tensor.ndim != 3 or tensor.shape[2] != 1:
        raise NonIntegralLabelError(
            f"Label maps are stored with dims [H, W, 1], got {list(tensor.shape)}.", path
        )

    if not np.all(tensor == np.round(tensor)):
        raise NonIntegralLabelError("Label map holds non-integral values.", path)

    labels = tensor[:, :, 0].astype(np.int64)
    if np.any(labels < 0) or (num_labels is not None and np.any(labels >= num_labels)):
        raise LabelRangeError(f"{path} : labels must lie in [0, {num_labels}).")

    return labels
