# SPDX-License-Identifier: GPL-3.0-or-later
"""
Reference mean field updates and the free energy trace of repeated passes.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np
from scipy.special import softmax

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.inference.pairwise import (
    FIXED_UNARY,
    CooccurrenceModel,
    PairwiseModel,
    TriplePenaltyModel,
)
from triple_mrf.mrf.energy import entropy_term, unary_energy
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
)
from triple_mrf.utils import require_same_shape

logger = logging.getLogger(__name__)

PARALLEL = "parallel"
SEQUENTIAL = "sequential-raster"

UPDATE_ORDERS = (PARALLEL, SEQUENTIAL)

# MARK: Schedule


@dataclass(frozen=True)
class MfSchedule:
    """
    How mean field passes are run.

    Parameters
    ----------
    iterations : int (default=1)
        Number of passes made by run_mf.

    order : str (default=parallel)
        Either "parallel" (every pixel from the same snapshot) or "sequential-raster"
        (pixels updated in place, row by row).

    damping : float (default=1.0)
        Weight alpha of the new candidate; 1 means no damping.
    """

    iterations: int = 1
    order: str = PARALLEL
    damping: float = 1.0

    def __post_init__(self) -> None:
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise InvalidParameterError(
                f"Mean field needs at least one iteration, got {self.iterations}."
            )

        if self.order not in UPDATE_ORDERS:
            raise InvalidParameterError(
                f"Unknown update order '{self.order}'. Choose from: {', '.join(UPDATE_ORDERS)}."
            )

        if not 0.0 <= self.damping <= 1.0:
            raise InvalidParameterError(f"Damping must lie in [0, 1], got {self.damping}.")


DEFAULT_SCHEDULE = MfSchedule()

# MARK: Updates


def mf_init(unary: UnaryField) -> np.ndarray:
    """
    Initial marginals q = p, already clamped and renormalized by the unary field.
    """
    return unary.probabilities.copy()


def _damp(candidate: np.ndarray, old: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 1.0:
        return candidate

    mixed = alpha * candidate + (1.0 - alpha) * old

    return mixed / mixed.sum(axis=-1, keepdims=True)


def _check_marginals(q: np.ndarray, unary: UnaryField) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    require_same_shape("q", q, "unary", unary.probabilities)

    return q


def mf_update_generic(
    q: np.ndarray,
    unary: UnaryField,
    model: PairwiseModel,
    schedule: MfSchedule = DEFAULT_SCHEDULE,
) -> np.ndarray:
    """
    One mean field pass q_i^u ∝ exp(-(Phi_i^u + penalty_i^u)) under a pairwise model.

    Parameters
    ----------
    q : np.ndarray
        The current H×W×l marginals.

    unary : UnaryField
        The unary field defining Phi = -ln p.

    model : PairwiseModel
        The pairwise term.

    schedule : MfSchedule
        Update order and damping; the iteration count is used by run_mf.

    Returns
    -------
    np.ndarray
        The new marginals, normalized per pixel.
    """
    q = _check_marginals(q, unary)
    log_unary = -unary.potentials

    if schedule.order == PARALLEL:
        candidate = softmax(log_unary - model.penalty(q), axis=-1)

        return _damp(candidate, q, schedule.damping)

    updated = q.copy()
    height, width = unary.shape
    for row in range(height):
        for col in range(width):
            candidate = softmax(log_unary[row, col] - model.pixel_penalty(updated, row, col))
            updated[row, col] = _damp(candidate, updated[row, col], schedule.damping)

    return updated


def mf_update_triple(
    q: np.ndarray,
    unary: UnaryField,
    ctx: ContextFilterBank,
    tw: TripleWindow,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
    schedule: MfSchedule = DEFAULT_SCHEDULE,
    kernel_source: str = FIXED_UNARY,
) -> np.ndarray:
    """
    One mean field pass under the triple penalty with a mixture of label contexts.

    Parameters
    ----------
    q : np.ndarray
        The current marginals.

    unary : UnaryField
        The unary field.

    ctx : ContextFilterBank
        The context costs; each (pixel, label) uses its cheapest component.

    tw : TripleWindow
        The window N_j.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    schedule : MfSchedule
        Update order and damping.

    kernel_source : str (default=fixed-unary)
        "fixed-unary" weighs the inner sums by p_j^v, "current-q" by q_j^v.

    Returns
    -------
    np.ndarray
        The updated marginals.
    """
    model = TriplePenaltyModel(unary, ctx, tw, feats, dp, kernel_source)

    return mf_update_generic(q, unary, model, schedule)


def mf_update_cooccurrence(
    q: np.ndarray,
    unary: UnaryField,
    table: np.ndarray,
    tw: TripleWindow,
    feats: PixelFeatureGrid,
    dp: DistanceParams,
    schedule: MfSchedule = DEFAULT_SCHEDULE,
    kernel_source: str = FIXED_UNARY,
) -> np.ndarray:
    """
    One mean field pass under a global l×l co-occurrence table.

    Parameters
    ----------
    q : np.ndarray
        The current marginals.

    unary : UnaryField
        The unary field.

    table : np.ndarray
        The l×l costs mu(u, v).

    tw : TripleWindow
        The window of paired pixels.

    feats : PixelFeatureGrid
        Intensities for the distance.

    dp : DistanceParams
        Distance weights.

    schedule : MfSchedule
        Update order and damping.

    kernel_source : str (default=fixed-unary)
        "fixed-unary", "current-q" or "none".

    Returns
    -------
    np.ndarray
        The updated marginals.
    """
    model = CooccurrenceModel(table, unary, tw, feats, dp, kernel_source)

    return mf_update_generic(q, unary, model, schedule)


def reduce_to_cooccurrence(ctx: ContextFilterBank) -> np.ndarray:
    """
    The global co-occurrence table of a single-component, centre-tap context bank.

    Parameters
    ----------
    ctx : ContextFilterBank
        A bank with K = 1 and n = 1.

    Returns
    -------
    np.ndarray
        The l×l table mu(u, v).
    """
    if ctx.num_components != 1 or ctx.size != 1:
        raise ShapeMismatchError(
            f"Only banks with K=1 and n=1 reduce to a co-occurrence table, got {ctx!r}."
        )

    return ctx.costs[0, :, 0, 0, :].copy()


# MARK: Free Energy


def model_free_energy(q: np.ndarray, unary: UnaryField, model: PairwiseModel) -> float:
    """
    Free energy sum q Phi + pairwise + sum q ln q under any pairwise model.
    """
    return unary_energy(q, unary) + model.pairwise_energy(q) + entropy_term(q)


def run_mf(
    q0: np.ndarray,
    unary: UnaryField,
    model: PairwiseModel,
    schedule: MfSchedule = DEFAULT_SCHEDULE,
) -> Tuple[np.ndarray, List[float]]:
    """
    Run schedule.iterations mean field passes and trace the free energy.

    Parameters
    ----------
    q0 : np.ndarray
        The starting marginals, usually mf_init(unary).

    unary : UnaryField
        The unary field.

    model : PairwiseModel
        The pairwise term.

    schedule : MfSchedule
        Iterations, update order and damping.

    Returns
    -------
    tuple of (np.ndarray, list of float)
        The final marginals and the free energy after each pass.
    """
    q = _check_marginals(q0, unary)
    logger.debug("Initial free energy: %.12g", model_free_energy(q, unary, model))

    trace = []
    for iteration in range(1, schedule.iterations + 1):
        q = mf_update_generic(q, unary, model, schedule)
        trace.append(model_free_energy(q, unary, model))
        logger.debug("Pass %d free energy: %.12g", iteration, trace[-1])

    return q, trace


def write_trace_csv(trace: List[float], path) -> None:
    """
    Write a free energy trace as "iter,free_energy" lines, passes numbered from 1.

    Parameters
    ----------
    trace : list of float
        Free energy after each pass.

    path : str or Path
        The destination CSV file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(["iter", "free_energy"])
        for iteration, value in enumerate(trace, start=1):
            writer.writerow([iteration, repr(float(value))])
