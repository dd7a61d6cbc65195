# SPDX-License-Identifier: GPL-3.0-or-later
"""
Pixel distances, MRF energies and the mean field free energy.

Windows are clipped at image borders: sums run over in-bounds pixels only and are
never renormalized.
"""

from typing import Tuple

import numpy as np
from scipy.special import xlogy

from triple_mrf.errors import LabelRangeError, ShapeMismatchError
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
    check_compatible,
)
from triple_mrf.utils import require_same_shape, shift_slices, window_offsets

Pixel = Tuple[int, int]

# MARK: Distance


def distance(
    feats: PixelFeatureGrid, pixel_a: Pixel, pixel_b: Pixel, params: DistanceParams
) -> float:
    """
    Distance d(i, j) between two pixels of a feature grid.

    Parameters
    ----------
    feats : PixelFeatureGrid
        The grid holding intensities.

    pixel_a : tuple of int
        (row, col) of the first pixel.

    pixel_b : tuple of int
        (row, col) of the second pixel.

    params : DistanceParams
        The intensity and spatial weights.

    Returns
    -------
    float
        omega1 |I_a - I_b|^2 + omega2 |pos_a - pos_b|^2.
    """
    height, width = feats.shape
    for row, col in (pixel_a, pixel_b):
        if not (0 <= row < height and 0 <= col < width):
            raise ShapeMismatchError(f"Pixel ({row}, {col}) lies outside a {height}×{width} grid.")

    diff = feats.intensity[pixel_a] - feats.intensity[pixel_b]
    spatial = (pixel_a[0] - pixel_b[0]) ** 2 + (pixel_a[1] - pixel_b[1]) ** 2

    return float(params.omega1 * np.dot(diff, diff) + params.omega2 * spatial)


def neighborhood_distance_sum(
    field: np.ndarray, feats: PixelFeatureGrid, params: DistanceParams, size: int
) -> np.ndarray:
    """
    Distance-weighted neighborhood sums S_j^v = sum over z in N_j of d(j, z) field_z^v.

    Parameters
    ----------
    field : np.ndarray
        An H×W×l field.

    feats : PixelFeatureGrid
        Intensities for the distance.

    params : DistanceParams
        Distance weights.

    size : int
        Odd extent of the window N_j.

    Returns
    -------
    np.ndarray
        The H×W×l sums; out-of-bounds neighbors contribute nothing.
    """
    height, width = field.shape[:2]
    intensity = feats.intensity
    sums = np.zeros_like(field, dtype=np.float64)

    for dy, dx in window_offsets(size):
        pairing = shift_slices(height, width, dy, dx)
        if pairing is None or (dy, dx) == (0, 0):
            continue

        target, source = pairing
        diff = intensity[target] - intensity[source]
        dist = params.omega1 * (diff * diff).sum(axis=-1) + params.omega2 * (dy * dy + dx * dx)
        sums[target] += dist[:, :, None] * field[source]

    return sums


def context_penalties(field: np.ndarray, ctx: ContextFilterBank) -> np.ndarray:
    """
    Per-component context sums P_k(i, u) = sum over offsets and v of mu_k(u, offset, v) field_{i+offset}^v.

    Parameters
    ----------
    field : np.ndarray
        An H×W×l field evaluated at the neighbors j.

    ctx : ContextFilterBank
        The context costs.

    Returns
    -------
    np.ndarray
        An H×W×K×l array of penalties.
    """
    height, width, num_labels = field.shape
    radius = ctx.radius
    penalties = np.zeros((height, width, ctx.num_components, num_labels))

    for dy, dx in window_offsets(ctx.size):
        pairing = shift_slices(height, width, dy, dx)
        if pairing is None:
            continue

        target, source = pairing
        costs = ctx.costs[:, :, dy + radius, dx + radius, :]
        penalties[target] += np.einsum("hwv,kuv->hwku", field[source], costs)

    return penalties


# MARK: Labelings


def one_hot(labels: np.ndarray, num_labels: int) -> np.ndarray:
    """
    The delta marginal field concentrated on a labeling.

    Parameters
    ----------
    labels : np.ndarray
        An H×W label map.

    num_labels : int
        The number of labels l.

    Returns
    -------
    np.ndarray
        An H×W×l float64 array of zeros and ones.
    """
    labels = np.asarray(labels)
    if np.any(labels < 0) or np.any(labels >= num_labels):
        raise LabelRangeError(f"Labels must lie in [0, {num_labels}).")

    return np.eye(num_labels)[labels]


def _check_labels(labels: np.ndarray, unary: UnaryField) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != tuple(unary.shape):
        raise ShapeMismatchError(
            f"Label map {labels.shape} does not match unary field {tuple(unary.shape)}."
        )

    return labels


def unary_energy(q: np.ndarray, unary: UnaryField) -> float:
    return float((q * unary.potentials).sum())


def entropy_term(q: np.ndarray) -> float:
    """
    The negative entropy sum of q ln q, with 0 ln 0 = 0.
    """
    return float(xlogy(q, q).sum())


# MARK: Triple Penalty


def triple_pairwise_energy(
    q: np.ndarray,
    unary: UnaryField,
    ctx: ContextFilterBank,
    tw: TripleWindow,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
) -> float:
    """
    Pairwise part of the free energy for the mixture-of-contexts triple penalty.

    Each pixel pays sum_u q_i^u min_k sum_j sum_v mu_k(u, j - i, v) q_j^v D_j^v where
    D_j^v = sum over z in N_j of d(j, z) p_z^v.

    Parameters
    ----------
    q : np.ndarray
        The H×W×l marginals.

    unary : UnaryField
        The unaries p defining D.

    ctx : ContextFilterBank
        The context costs mu_k.

    tw : TripleWindow
        The window N_j.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    Returns
    -------
    float
        The pairwise energy.
    """
    triple_mass = neighborhood_distance_sum(unary.probabilities, feats, dp, tw.size)
    penalties = context_penalties(q * triple_mass, ctx).min(axis=2)

    return float((q * penalties).sum())


def energy(
    labels: np.ndarray,
    unary: UnaryField,
    ctx: ContextFilterBank,
    tw: TripleWindow,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
) -> float:
    """
    MRF energy of a labeling under the unary and triple-penalty context terms.

    Parameters
    ----------
    labels : np.ndarray
        The H×W labeling y.

    unary : UnaryField
        The unary probabilities.

    ctx : ContextFilterBank
        The context costs; the cheapest component is active at every pixel.

    tw : TripleWindow
        The triple window N_j.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    Returns
    -------
    float
        sum_i -ln p_i^{y_i} plus the pairwise cost of y.
    """
    check_compatible(unary, feats, ctx)
    labels = _check_labels(labels, unary)
    q = one_hot(labels, unary.num_labels)

    return unary_energy(q, unary) + triple_pairwise_energy(q, unary, ctx, tw, feats, dp)


def free_energy(
    q: np.ndarray,
    unary: UnaryField,
    ctx: ContextFilterBank,
    tw: TripleWindow,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
) -> float:
    """
    Variational free energy sum q Phi + pairwise + sum q ln q of a marginal field.

    Parameters
    ----------
    q : np.ndarray
        The H×W×l marginals, normalized per pixel.

    unary : UnaryField
        The unary probabilities.

    ctx : ContextFilterBank
        The context costs.

    tw : TripleWindow
        The triple window.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    Returns
    -------
    float
        The free energy; equals energy(y) when q is the one-hot field of y.
    """
    check_compatible(unary, feats, ctx)
    require_same_shape("q", q, "unary", unary.probabilities)

    return (
        unary_energy(q, unary)
        + triple_pairwise_energy(q, unary, ctx, tw, feats, dp)
        + entropy_term(q)
    )


# MARK: Co-occurrence


def cooccurrence_energy(
    labels: np.ndarray,
    unary: UnaryField,
    table: np.ndarray,
    tw: TripleWindow,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
) -> float:
    """
    Energy of the global co-occurrence baseline Psi(y_i, y_z) = mu(y_i, y_z) d(i, z).

    Every unordered pair {i, z} with z in the m×m window of i contributes once, with
    the table symmetrized as (mu(a, b) + mu(b, a)) / 2.

    Parameters
    ----------
    labels : np.ndarray
        The H×W labeling.

    unary : UnaryField
        The unary probabilities.

    table : np.ndarray
        The l×l co-occurrence costs.

    tw : TripleWindow
        The pairing window.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    Returns
    -------
    float
        The energy.
    """
    check_compatible(unary, feats)
    labels = _check_labels(labels, unary)
    table = np.asarray(table, dtype=np.float64)
    if table.shape != (unary.num_labels, unary.num_labels):
        raise ShapeMismatchError(f"Co-occurrence table must be l×l, got {table.shape}.")

    q = one_hot(labels, unary.num_labels)
    neighbors = neighborhood_distance_sum(q, feats, dp, tw.size)
    pairwise = 0.5 * float(np.einsum("hwu,uv,hwv->", q, table, neighbors))

    return unary_energy(q, unary) + pairwise


__all__ = [
    "context_penalties",
    "cooccurrence_energy",
    "distance",
    "energy",
    "entropy_term",
    "free_energy",
    "neighborhood_distance_sum",
    "one_hot",
    "triple_pairwise_energy",
    "unary_energy",
]
