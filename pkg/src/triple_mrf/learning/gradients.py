# SPDX-License-Identifier: GPL-3.0-or-later
"""
Analytic gradients of the pixelwise loss through the smoothness head.

The triple penalty kernels stay fixed; only the distance weights that parameterize them,
the linear activation and the context costs receive gradient. Block min pooling routes
gradient to the active component alone.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.special import softmax

from triple_mrf.layers.dpn import context_conv_b13
from triple_mrf.layers.kernels import combine_distances, distance_components, padded_windows
from triple_mrf.learning.corpus import Instance
from triple_mrf.learning.loss import pixelwise_loss, valid_pixels
from triple_mrf.learning.params import ParamGradients, ParamSet, check_stage
from triple_mrf.mrf.model import ContextFilterBank, DistanceParams
from triple_mrf.utils import EPSILON, parallel_map

# MARK: Forward


@dataclass(frozen=True)
class ForwardCache:
    """
    Intermediate values of one forward pass needed by the backward pass.
    """

    intensity: np.ndarray
    spatial: np.ndarray
    unary_windows: np.ndarray
    filtered: np.ndarray
    o12: np.ndarray
    blocks: np.ndarray
    active: np.ndarray
    o15: np.ndarray


def forward(instance: Instance, params: ParamSet) -> ForwardCache:
    """
    Run the smoothness head on an instance and keep what backpropagation needs.

    Parameters
    ----------
    instance : Instance
        The image.

    params : ParamSet
        The parameters.

    Returns
    -------
    ForwardCache
        The intermediates, with o15 the output marginals.
    """
    probabilities = instance.unary.probabilities
    height, width, num_labels = probabilities.shape
    num_components = params.ctx.num_components

    intensity, spatial = distance_components(instance.feats, params.tw.size)
    distances = combine_distances(intensity, spatial, params.dp)
    unary_windows = padded_windows(probabilities, params.tw.size)

    filtered = probabilities * np.einsum("hwyx,hwvyx->hwv", distances, unary_windows)
    o12 = params.a * filtered + params.b

    blocks = context_conv_b13(o12, params.ctx).reshape(height, width, num_labels, num_components)
    active = blocks.argmin(axis=-1)
    o14 = np.take_along_axis(blocks, active[..., None], axis=-1)[..., 0]
    o15 = softmax(np.log(probabilities) - o14, axis=-1)

    return ForwardCache(intensity, spatial, unary_windows, filtered, o12, blocks, active, o15)


# MARK: Backward


def _scatter_windows(contributions: np.ndarray, size: int) -> np.ndarray:
    """
    Transpose of padded_windows: add every window entry back onto the pixel it came from.
    """
    height, width, channels = contributions.shape[:3]
    radius = size // 2
    padded = np.zeros((height + 2 * radius, width + 2 * radius, channels))
    for row in range(size):
        for col in range(size):
            padded[row : row + height, col : col + width] += contributions[:, :, :, row, col]

    return padded[radius : radius + height, radius : radius + width]


def instance_gradients(
    instance: Instance, params: ParamSet, ignore_label: int = None
) -> Tuple[float, ParamGradients]:
    """
    Loss and gradients of every parameter for one image.

    Parameters
    ----------
    instance : Instance
        The image.

    params : ParamSet
        The parameters.

    ignore_label : int, optional
        Ground truth label excluded from the loss.

    Returns
    -------
    tuple of (float, ParamGradients)
        The pixelwise loss and its gradients.
    """
    cache = forward(instance, params)
    gt = instance.labels
    probabilities = instance.unary.probabilities
    num_labels = probabilities.shape[2]

    loss = pixelwise_loss(cache.o15, gt, ignore_label)
    valid = valid_pixels(gt, num_labels, ignore_label)
    count = int(valid.sum())
    if count == 0:
        return loss, ParamGradients.zeros_like(params)

    targets = np.where(valid, gt, 0)
    picked = np.take_along_axis(cache.o15, targets[..., None], axis=-1)[..., 0]
    # Pixels clamped at EPSILON have a flat loss.
    live = valid & (picked >= EPSILON)

    grad_logits = cache.o15 - np.eye(num_labels)[targets]
    grad_logits *= live[..., None] / count

    grad_blocks = np.zeros_like(cache.blocks)
    np.put_along_axis(grad_blocks, cache.active[..., None], -grad_logits[..., None], axis=-1)

    ctx_windows = padded_windows(cache.o12, params.ctx.size)
    grad_mu = np.einsum("hwuk,hwvyx->kuyxv", grad_blocks, ctx_windows)

    contributions = np.einsum("hwuk,kuyxv->hwvyx", grad_blocks, params.ctx.costs)
    grad_o12 = _scatter_windows(contributions, params.ctx.size)

    grad_a = float((grad_o12 * cache.filtered).sum())
    grad_b = float(grad_o12.sum())

    grad_filtered = params.a * grad_o12
    grad_distances = np.einsum(
        "hwv,hwvyx->hwyx", grad_filtered * probabilities, cache.unary_windows
    )

    return loss, ParamGradients(
        omega1=float((grad_distances * cache.intensity).sum()),
        omega2=float((grad_distances * cache.spatial).sum()),
        a=grad_a,
        b=grad_b,
        mu=grad_mu,
    )


def grad_params(
    batch: Sequence[Instance],
    params: ParamSet,
    stage: str,
    ignore_label: int = None,
    threads: int = 1,
) -> Tuple[float, ParamGradients]:
    """
    Mean loss over a batch and the gradients of the parameters live in a stage.

    Parameters
    ----------
    batch : sequence of Instance
        The images; the batch loss is the mean of their losses.

    params : ParamSet
        The parameters.

    stage : str
        Frozen parameters get exactly zero gradient.

    ignore_label : int, optional
        Ground truth label excluded from the loss.

    threads : int (default=1)
        Worker threads over images; the reduction keeps image order.

    Returns
    -------
    tuple of (float, ParamGradients)
        The batch loss and masked gradients.
    """
    check_stage(stage)
    results = parallel_map(
        lambda instance: instance_gradients(instance, params, ignore_label), batch, threads
    )

    total_loss = 0.0
    total = ParamGradients.zeros_like(params)
    for loss, grads in results:
        total_loss += loss
        total = total + grads

    scale = 1.0 / len(results)

    return total_loss * scale, total.scaled(scale).masked(stage)


# MARK: Checks


def batch_loss(batch: Sequence[Instance], params: ParamSet, ignore_label: int = None) -> float:
    losses = [
        pixelwise_loss(forward(instance, params).o15, instance.labels, ignore_label)
        for instance in batch
    ]

    return float(np.mean(losses))


def numerical_gradients(
    batch: Sequence[Instance],
    params: ParamSet,
    step: float = 1e-5,
    ignore_label: int = None,
) -> ParamGradients:
    """
    Central finite difference gradients of the batch loss.

    Parameters
    ----------
    batch : sequence of Instance
        The images.

    params : ParamSet
        The parameters; distance weights must exceed step.

    step : float (default=1e-5)
        The difference step h.

    ignore_label : int, optional
        Ground truth label excluded from the loss.

    Returns
    -------
    ParamGradients
        The approximated gradients of every parameter.
    """

    def central(plus: ParamSet, minus: ParamSet) -> float:
        return (batch_loss(batch, plus, ignore_label) - batch_loss(batch, minus, ignore_label)) / (
            2 * step
        )

    def with_dp(omega1: float, omega2: float) -> ParamSet:
        return ParamSet(DistanceParams(omega1, omega2), params.a, params.b, params.ctx, params.tw)

    def with_ab(a: float, b: float) -> ParamSet:
        return ParamSet(params.dp, a, b, params.ctx, params.tw)

    omega1, omega2 = params.dp.omega1, params.dp.omega2
    grad_mu = np.zeros_like(params.ctx.costs)
    for index in np.ndindex(*grad_mu.shape):
        plus, minus = params.ctx.costs.copy(), params.ctx.costs.copy()
        plus[index] += step
        minus[index] -= step
        grad_mu[index] = central(
            ParamSet(params.dp, params.a, params.b, ContextFilterBank(plus), params.tw),
            ParamSet(params.dp, params.a, params.b, ContextFilterBank(minus), params.tw),
        )

    return ParamGradients(
        omega1=central(with_dp(omega1 + step, omega2), with_dp(omega1 - step, omega2)),
        omega2=central(with_dp(omega1, omega2 + step), with_dp(omega1, omega2 - step)),
        a=central(with_ab(params.a + step, params.b), with_ab(params.a - step, params.b)),
        b=central(with_ab(params.a, params.b + step), with_ab(params.a, params.b - step)),
        mu=grad_mu,
    )
