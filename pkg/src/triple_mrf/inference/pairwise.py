# SPDX-License-Identifier: GPL-3.0-or-later
"""
Pairwise models consumed by the mean field updates.

A model answers two questions about a marginal field q: the penalty every (pixel, label)
pays given its neighbors, and the pairwise part of the free energy.
"""

import abc

import numpy as np

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.mrf.energy import (
    context_penalties,
    neighborhood_distance_sum,
    triple_pairwise_energy,
)
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
    check_compatible,
)
from triple_mrf.utils import window_offsets

FIXED_UNARY = "fixed-unary"
CURRENT_Q = "current-q"
NO_KERNEL = "none"

KERNEL_SOURCES = (FIXED_UNARY, CURRENT_Q, NO_KERNEL)


def check_kernel_source(kernel_source: str, allowed=KERNEL_SOURCES) -> str:
    if kernel_source not in allowed:
        raise InvalidParameterError(
            f"Unknown kernel source '{kernel_source}'. Choose from: {', '.join(allowed)}."
        )

    return kernel_source


def pixel_distance_sum(
    field: np.ndarray,
    feats: PixelFeatureGrid,
    params: DistanceParams,
    size: int,
    row: int,
    col: int,
) -> np.ndarray:
    """
    The distance-weighted window sum of one pixel, sum over z of d(j, z) field_z^v.

    Parameters
    ----------
    field : np.ndarray
        An H×W×l field.

    feats : PixelFeatureGrid
        Intensities for the distance.

    params : DistanceParams
        Distance weights.

    size : int
        Odd extent of the window.

    row : int
        Row of the pixel j.

    col : int
        Column of the pixel j.

    Returns
    -------
    np.ndarray
        A vector of l sums.
    """
    height, width = field.shape[:2]
    radius = size // 2
    row_start, row_stop = max(0, row - radius), min(height, row + radius + 1)
    col_start, col_stop = max(0, col - radius), min(width, col + radius + 1)

    rows, cols = np.mgrid[row_start:row_stop, col_start:col_stop]
    diff = feats.intensity[row_start:row_stop, col_start:col_stop] - feats.intensity[row, col]
    dist = params.omega1 * (diff * diff).sum(axis=-1) + params.omega2 * (
        (rows - row) ** 2 + (cols - col) ** 2
    )

    return np.einsum("hw,hwv->v", dist, field[row_start:row_stop, col_start:col_stop])


# MARK: Base


class PairwiseModel(abc.ABC):
    """
    Interface of the pairwise term Psi seen by the mean field updates.
    """

    @abc.abstractmethod
    def penalty(self, q: np.ndarray) -> np.ndarray:
        """
        H×W×l penalties sum_j sum_v q_j^v Psi_ij^uv for every pixel i and label u.
        """

    @abc.abstractmethod
    def pixel_penalty(self, q: np.ndarray, row: int, col: int) -> np.ndarray:
        """
        The l penalties of a single pixel, read from the current q.
        """

    @abc.abstractmethod
    def pairwise_energy(self, q: np.ndarray) -> float:
        """
        The pairwise part of the free energy of q.
        """


# MARK: Dense


class DensePairwise(PairwiseModel):
    """
    An explicit table ``psi[i_row, i_col, j_row, j_col, u, v]`` of pairwise costs.

    Parameters
    ----------
    psi : np.ndarray
        The H×W×H×W×l×l table. Self pairs should be zero; a symmetric table with
        psi[i, j, u, v] == psi[j, i, v, u] counts each unordered edge once in the energy.
    """

    def __init__(self, psi: np.ndarray) -> None:
        psi = np.array(psi, dtype=np.float64)
        if psi.ndim != 6 or psi.shape[:2] != psi.shape[2:4] or psi.shape[4] != psi.shape[5]:
            raise ShapeMismatchError(f"Dense pairwise tables are H×W×H×W×l×l, got {psi.shape}.")

        if not np.all(np.isfinite(psi)):
            raise InvalidParameterError("Pairwise costs must be finite.")

        psi.setflags(write=False)
        self.psi = psi

    def _check(self, q: np.ndarray) -> None:
        if q.shape != self.psi.shape[:2] + self.psi.shape[4:5]:
            raise ShapeMismatchError(
                f"Marginals {q.shape} do not fit a pairwise table of shape {self.psi.shape}."
            )

    def penalty(self, q: np.ndarray) -> np.ndarray:
        self._check(q)

        return np.einsum("abcduv,cdv->abu", self.psi, q)

    def pixel_penalty(self, q: np.ndarray, row: int, col: int) -> np.ndarray:
        self._check(q)

        return np.einsum("cduv,cdv->u", self.psi[row, col], q)

    def pairwise_energy(self, q: np.ndarray) -> float:
        return 0.5 * float((q * self.penalty(q)).sum())


# MARK: Co-occurrence


class CooccurrenceModel(PairwiseModel):
    """
    Global label co-occurrence costs mu(u, v) weighted by pixel distances.

    The penalty of (i, u) is sum_v mu(u, v) w_i^v sum over z in the m×m window of i of
    d(i, z) q_z^v. The kernel weight w is p (fixed-unary), q (current-q) or 1 (none); the
    last is the plain co-occurrence baseline, the first is what a triple penalty with a
    single centre-tap context reduces to.

    Parameters
    ----------
    table : np.ndarray
        The l×l costs mu(u, v).

    unary : UnaryField
        The unary field.

    tw : TripleWindow
        The window of z.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    kernel_source : str (default=fixed-unary)
        Where the kernel weights come from.
    """

    def __init__(
        self,
        table: np.ndarray,
        unary: UnaryField,
        tw: TripleWindow,
        feats: PixelFeatureGrid,
        dp: DistanceParams,
        kernel_source: str = FIXED_UNARY,
    ) -> None:
        table = np.array(table, dtype=np.float64)
        if table.shape != (unary.num_labels, unary.num_labels):
            raise ShapeMismatchError(
                f"Co-occurrence table must be {unary.num_labels}×{unary.num_labels}, "
                f"got {table.shape}."
            )

        check_compatible(unary, feats)
        table.setflags(write=False)

        self.table = table
        self.unary = unary
        self.tw = tw
        self.feats = feats
        self.dp = dp
        self.kernel_source = check_kernel_source(kernel_source)

    def _weights(self, q: np.ndarray):
        if self.kernel_source == FIXED_UNARY:
            return self.unary.probabilities

        if self.kernel_source == CURRENT_Q:
            return q

        return 1.0

    def penalty(self, q: np.ndarray) -> np.ndarray:
        sums = neighborhood_distance_sum(q, self.feats, self.dp, self.tw.size)

        return np.einsum("uv,hwv->hwu", self.table, self._weights(q) * sums)

    def pixel_penalty(self, q: np.ndarray, row: int, col: int) -> np.ndarray:
        sums = pixel_distance_sum(q, self.feats, self.dp, self.tw.size, row, col)
        weights = self._weights(q)
        if not np.isscalar(weights):
            weights = weights[row, col]

        return self.table @ (weights * sums)

    def pairwise_energy(self, q: np.ndarray) -> float:
        return 0.5 * float((q * self.penalty(q)).sum())


# MARK: Triple Penalty


class TriplePenaltyModel(PairwiseModel):
    """
    The triple penalty with a mixture of label contexts.

    The penalty of (i, u) is min_k sum over offsets delta and labels v of
    mu_k(u, delta, v) T(i + delta, v) with T(j, v) = w_j^v sum over z in N_j of
    d(j, z) q_z^v. The kernel weight w is p (fixed-unary, the frozen filters of the
    locally convolutional layer) or q (current-q).

    Parameters
    ----------
    unary : UnaryField
        The unary field.

    ctx : ContextFilterBank
        The context costs.

    tw : TripleWindow
        The window N_j.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    kernel_source : str (default=fixed-unary)
        Where the kernel weights come from.
    """

    def __init__(
        self,
        unary: UnaryField,
        ctx: ContextFilterBank,
        tw: TripleWindow,
        feats: PixelFeatureGrid,
        dp: DistanceParams,
        kernel_source: str = FIXED_UNARY,
    ) -> None:
        check_compatible(unary, feats, ctx)

        self.unary = unary
        self.ctx = ctx
        self.tw = tw
        self.feats = feats
        self.dp = dp
        self.kernel_source = check_kernel_source(kernel_source, (FIXED_UNARY, CURRENT_Q))

    def _weights(self, q: np.ndarray) -> np.ndarray:
        return self.unary.probabilities if self.kernel_source == FIXED_UNARY else q

    def triple_sums(self, q: np.ndarray) -> np.ndarray:
        """
        The H×W×l inner sums T(j, v) of the triple penalty.
        """
        sums = neighborhood_distance_sum(q, self.feats, self.dp, self.tw.size)

        return self._weights(q) * sums

    def component_penalties(self, q: np.ndarray) -> np.ndarray:
        """
        The H×W×K×l penalties of every mixture component before the minimum.
        """
        return context_penalties(self.triple_sums(q), self.ctx)

    def penalty(self, q: np.ndarray) -> np.ndarray:
        return self.component_penalties(q).min(axis=2)

    def pixel_penalty(self, q: np.ndarray, row: int, col: int) -> np.ndarray:
        height, width = q.shape[:2]
        radius = self.ctx.radius
        weights = self._weights(q)
        penalties = np.zeros((self.ctx.num_components, self.ctx.num_labels))

        for dy, dx in window_offsets(self.ctx.size):
            j_row, j_col = row + dy, col + dx
            if not (0 <= j_row < height and 0 <= j_col < width):
                continue

            sums = pixel_distance_sum(q, self.feats, self.dp, self.tw.size, j_row, j_col)
            costs = self.ctx.costs[:, :, dy + radius, dx + radius, :]
            penalties += costs @ (weights[j_row, j_col] * sums)

        return penalties.min(axis=0)

    def pairwise_energy(self, q: np.ndarray) -> float:
        return triple_pairwise_energy(q, self.unary, self.ctx, self.tw, self.feats, self.dp)
