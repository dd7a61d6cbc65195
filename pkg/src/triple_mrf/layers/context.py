# SPDX-License-Identifier: GPL-3.0-or-later
"""
Summaries of learned label contexts.
"""

import numpy as np

from triple_mrf.mrf.model import ContextFilterBank


def label_compatibility(ctx: ContextFilterBank) -> np.ndarray:
    """
    Total cost of each (component, target label, source label) over the context window.

    Parameters
    ----------
    ctx : ContextFilterBank
        The context costs.

    Returns
    -------
    np.ndarray
        A K×l×l table; negative entries mark label pairs that reward co-occurrence. Not
        symmetric in general.
    """
    return ctx.costs.sum(axis=(2, 3))


def dominant_offsets(ctx: ContextFilterBank) -> np.ndarray:
    """
    Offset of the cheapest cost for every (component, target label, source label).

    Parameters
    ----------
    ctx : ContextFilterBank
        The context costs.

    Returns
    -------
    np.ndarray
        A K×l×l×2 integer array of (dy, dx); ties keep the first offset in raster order.
    """
    num_components, num_labels, size, _, _ = ctx.costs.shape
    flat = np.moveaxis(ctx.costs, -1, 2).reshape(num_components, num_labels, num_labels, -1)
    rows, cols = np.divmod(flat.argmin(axis=-1), size)

    return np.stack([rows - ctx.radius, cols - ctx.radius], axis=-1)
