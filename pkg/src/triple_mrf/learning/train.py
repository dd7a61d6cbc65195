# SPDX-License-Identifier: GPL-3.0-or-later
"""
Incremental training of the smoothness head with plain gradient descent.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from tqdm.auto import tqdm

from triple_mrf.errors import InvalidParameterError, TrainingDivergedError
from triple_mrf.learning.corpus import Instance
from triple_mrf.learning.gradients import forward, grad_params
from triple_mrf.learning.loss import pixelwise_loss
from triple_mrf.learning.params import UNARY_PASSTHROUGH, ParamSet, check_stage
from triple_mrf.utils import parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """
    Settings of one training stage.

    Parameters
    ----------
    stage : str
        One of unary-passthrough, triple, context or joint.

    learning_rate : float (default=0.1)
        Gradient descent step size; 0 leaves the parameters unchanged.

    iterations : int (default=50)
        Number of steps.

    batch_size : int (default=8)
        Images per step, drawn without replacement.

    seed : int (default=0)
        Seed of the batch draws.
    """

    stage: str
    learning_rate: float = 0.1
    iterations: int = 50
    batch_size: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        check_stage(self.stage)
        if not np.isfinite(self.learning_rate) or self.learning_rate < 0:
            raise InvalidParameterError(
                f"Learning rate must be finite and non-negative, got {self.learning_rate}."
            )

        if self.iterations < 1 or self.batch_size < 1:
            raise InvalidParameterError("Iterations and batch size must be positive.")


class TraceRow(NamedTuple):
    stage: str
    iteration: int
    loss: float


class StageSummary(NamedTuple):
    stage: str
    entry_loss: float
    exit_loss: float
    reverted: bool


@dataclass(frozen=True)
class TrainingResult:
    """
    Final parameters, the per-step loss trace and a summary of every stage.
    """

    params: ParamSet
    trace: Tuple[TraceRow, ...]
    stages: Tuple[StageSummary, ...]


# MARK: Evaluation


def evaluate_corpus(
    corpus: Sequence[Instance],
    params: ParamSet,
    ignore_label: int = None,
    threads: int = 1,
) -> Tuple[float, List[np.ndarray]]:
    """
    Mean loss of a corpus and the argmax labelings of the refined marginals.

    Parameters
    ----------
    corpus : sequence of Instance
        The images.

    params : ParamSet
        The parameters.

    ignore_label : int, optional
        Ground truth label excluded from the loss.

    threads : int (default=1)
        Worker threads over images.

    Returns
    -------
    tuple of (float, list of np.ndarray)
        The mean loss and one H×W prediction per image.
    """

    def run(instance: Instance):
        o15 = forward(instance, params).o15
        return pixelwise_loss(o15, instance.labels, ignore_label), o15.argmax(axis=-1)

    results = parallel_map(run, corpus, threads)
    loss = float(np.mean([loss for loss, _ in results]))

    return loss, [prediction for _, prediction in results]


# MARK: Training


def _run_stage(
    corpus: Sequence[Instance],
    params: ParamSet,
    config: TrainConfig,
    ignore_label: int,
    threads: int,
    verbose: bool,
) -> Tuple[ParamSet, List[TraceRow], StageSummary]:
    entry_loss, _ = evaluate_corpus(corpus, params, ignore_label, threads)
    trace = [TraceRow(config.stage, 0, entry_loss)]

    if config.stage == UNARY_PASSTHROUGH:
        logger.info("Validated %d instances, loss %.6f", len(corpus), entry_loss)
        return params, trace, StageSummary(config.stage, entry_loss, entry_loss, False)

    rng = np.random.default_rng(config.seed)
    batch_size = min(config.batch_size, len(corpus))
    entry_params = params
    last_finite = entry_loss

    for step in tqdm(
        range(1, config.iterations + 1),
        desc=f"Stage {config.stage}",
        unit="step",
        disable=not verbose,
    ):
        indices = rng.choice(len(corpus), size=batch_size, replace=False)
        batch = [corpus[index] for index in sorted(indices)]

        batch_loss, grads = grad_params(batch, params, config.stage, ignore_label, threads)
        if not np.isfinite(batch_loss):
            raise TrainingDivergedError(config.stage, step, last_finite)

        params = params.step(grads, config.learning_rate, config.stage)
        loss, _ = evaluate_corpus(corpus, params, ignore_label, threads)
        if not np.isfinite(loss):
            raise TrainingDivergedError(config.stage, step, last_finite)

        last_finite = loss
        trace.append(TraceRow(config.stage, step, loss))
        logger.debug("Stage %s step %d: loss %.6f", config.stage, step, loss)

    reverted = last_finite > entry_loss
    if reverted:
        logger.warning(
            "Stage %s ended at loss %.6f above its entry loss %.6f; keeping the entry parameters.",
            config.stage,
            last_finite,
            entry_loss,
        )
        params = entry_params

    exit_loss = entry_loss if reverted else last_finite
    logger.info("Stage %s: loss %.6f -> %.6f", config.stage, entry_loss, exit_loss)

    return params, trace, StageSummary(config.stage, entry_loss, exit_loss, reverted)


def train_incremental(
    corpus: Sequence[Instance],
    configs: Sequence[TrainConfig],
    params: ParamSet,
    ignore_label: int = None,
    threads: int = 1,
    verbose: bool = False,
) -> TrainingResult:
    """
    Run training stages in order, each updating only its live parameters.

    Parameters
    ----------
    corpus : sequence of Instance
        The training images.

    configs : sequence of TrainConfig
        The stages, usually unary-passthrough, triple, context and joint. A single
        joint stage trains every parameter at once.

    params : ParamSet
        The starting parameters.

    ignore_label : int, optional
        Ground truth label excluded from the loss.

    threads : int (default=1)
        Worker threads over images; results do not depend on it.

    verbose : bool (default=False)
        Show progress bars.

    Returns
    -------
    TrainingResult
        Final parameters, the loss after every step and the per-stage summaries. A stage
        that ends above its entry loss is reverted.

    Raises
    ------
    TrainingDivergedError
        If a loss becomes non-finite.
    """
    if not corpus:
        raise InvalidParameterError("Training needs a non-empty corpus.")

    for instance in corpus:
        if instance.unary.num_labels != params.num_labels:
            raise InvalidParameterError(
                f"{instance!r} has {instance.unary.num_labels} labels, parameters have "
                f"{params.num_labels}."
            )

    trace: List[TraceRow] = []
    stages: List[StageSummary] = []
    for config in configs:
        params, stage_trace, summary = _run_stage(
            corpus, params, config, ignore_label, threads, verbose
        )
        trace.extend(stage_trace)
        stages.append(summary)

    return TrainingResult(params, tuple(trace), tuple(stages))


def write_loss_trace_csv(trace: Sequence[TraceRow], path) -> None:
    """
    Write a loss trace as "stage,iter,loss" lines.

    Parameters
    ----------
    trace : sequence of TraceRow
        The trace rows.

    path : str or Path
        The destination CSV file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(["stage", "iter", "loss"])
        for row in trace:
            writer.writerow([row.stage, row.iteration, repr(float(row.loss))])
