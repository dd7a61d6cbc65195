# SPDX-License-Identifier: GPL-3.0-or-later
"""
Utility functions shared by the inference, layer, learning and metric modules.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Tuple, TypeVar

import numpy as np

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# MARK: Utils Variables

EPSILON = 1e-12
NORMALIZATION_TOLERANCE = 1e-9

DEFAULT_OUTPUT_DIR = "triple_mrf_output"
DEFAULT_PARAMS_DIR = "triple_mrf_params"
DEFAULT_CORPUS_DIR = "triple_mrf_corpus"

PARAMS_META_FILE = "params.meta"
CONTEXT_TENSOR_FILE = "context.dpt"

# MARK: Probabilities


def clamp_and_normalize(probabilities: np.ndarray) -> np.ndarray:
    """
    Clamp probabilities from below at EPSILON and renormalize over the last axis.

    Parameters
    ----------
    probabilities : np.ndarray
        Per-pixel label probabilities with labels on the last axis.

    Returns
    -------
    np.ndarray
        A float64 copy whose entries are at least EPSILON before renormalization and
        whose last-axis sums are 1.
    """
    clamped = np.maximum(np.asarray(probabilities, dtype=np.float64), EPSILON)

    return clamped / clamped.sum(axis=-1, keepdims=True)


def check_normalized(q: np.ndarray, tolerance: float = NORMALIZATION_TOLERANCE) -> bool:
    """
    Check that a marginal field lies in [0, 1] and sums to 1 per pixel.
    """
    q = np.asarray(q)
    if np.any(q < 0.0) or np.any(q > 1.0 + tolerance):
        return False

    return bool(np.all(np.abs(q.sum(axis=-1) - 1.0) <= tolerance))


def require_same_shape(name_a: str, a: np.ndarray, name_b: str, b: np.ndarray) -> None:
    """
    Raise ShapeMismatchError when two arrays do not share a shape.

    Parameters
    ----------
    name_a : str
        Name of the first operand, used in the error message.

    a : np.ndarray
        The first operand.

    name_b : str
        Name of the second operand, used in the error message.

    b : np.ndarray
        The second operand.

    Raises
    ------
    ShapeMismatchError
        If the shapes differ.
    """
    if np.shape(a) != np.shape(b):
        raise ShapeMismatchError(
            f"Shape of {name_a} {np.shape(a)} does not match shape of {name_b} {np.shape(b)}."
        )


# MARK: Windows


def check_odd_window(size: int, name: str) -> int:
    """
    Validate that a window extent is a positive odd integer.

    Parameters
    ----------
    size : int
        The window extent.

    name : str
        Name of the window used in the error message.

    Returns
    -------
    int
        The validated extent.

    Raises
    ------
    InvalidParameterError
        If the extent is even or smaller than one.
    """
    if int(size) != size or size < 1 or size % 2 == 0:
        raise InvalidParameterError(
            f"Window '{name}' must be a positive odd integer, got {size}. "
            "Even windows such as 50 should be approximated by 49 or 51."
        )

    return int(size)


def window_offsets(size: int) -> List[Tuple[int, int]]:
    """
    All (dy, dx) offsets of a size×size window in raster order.
    """
    radius = size // 2

    return [
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
    ]


def shift_slices(height: int, width: int, dy: int, dx: int):
    """
    Slices pairing every pixel j with its in-bounds neighbor j + (dy, dx).

    Parameters
    ----------
    height : int
        Number of image rows.

    width : int
        Number of image columns.

    dy : int
        Row offset of the neighbor.

    dx : int
        Column offset of the neighbor.

    Returns
    -------
    tuple or None
        ``(target, source)`` index tuples such that ``array[source]`` holds the
        neighbors of the pixels ``array[target]``; None when no pixel has an in-bounds
        neighbor at this offset.
    """
    row_start, row_stop = max(0, -dy), min(height, height - dy)
    col_start, col_stop = max(0, -dx), min(width, width - dx)

    if row_start >= row_stop or col_start >= col_stop:
        return None

    target = (slice(row_start, row_stop), slice(col_start, col_stop))
    source = (
        slice(row_start + dy, row_stop + dy),
        slice(col_start + dx, col_stop + dx),
    )

    return target, source


# MARK: Parallel


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply a function to every item, optionally on a thread pool.

    Results keep the order of the inputs so any later reduction is identical for every
    thread count.

    Parameters
    ----------
    func : Callable
        The function to apply.

    items : Iterable
        The inputs.

    threads : int (default=1)
        Number of worker threads; 1 runs in the calling thread.

    Returns
    -------
    list
        The results in input order.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug("Mapping %d items over %d threads", len(items), threads)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


# MARK: Key-Value Files


def parse_key_values(lines: Iterable[str], source: str = "<config>") -> Dict[str, str]:
    """
    Parse key=value lines, skipping blank lines and # comments.

    Parameters
    ----------
    lines : Iterable of str
        The lines to parse.

    source : str (default=<config>)
        Name of the input used in error messages.

    Returns
    -------
    dict
        Stripped keys mapped to stripped values; later lines win.
    """
    values = {}
    for line_number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue

        if "=" not in line:
            raise InvalidParameterError(
                f"{source}:{line_number}: expected key=value, got '{line}'."
            )

        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()

    return values


def read_key_values(path) -> Dict[str, str]:
    """
    Read a key=value file.
    """
    with open(path, encoding="utf-8") as file:
        return parse_key_values(file, str(path))
