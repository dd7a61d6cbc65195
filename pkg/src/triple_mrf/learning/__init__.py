# SPDX-License-Identifier: GPL-3.0-or-later
"""
Loss, gradients and staged training of the smoothness head.
"""

from triple_mrf.learning.corpus import Instance, load_corpus, save_corpus
from triple_mrf.learning.gradients import grad_params, numerical_gradients
from triple_mrf.learning.loss import pixelwise_loss
from triple_mrf.learning.params import (
    ParamGradients,
    ParamSet,
    init_params,
    load_params,
    save_params,
)
from triple_mrf.learning.synthetic import SceneSpec, gen_synthetic, read_scene_spec
from triple_mrf.learning.train import (
    TrainConfig,
    TrainingResult,
    evaluate_corpus,
    train_incremental,
    write_loss_trace_csv,
)

__all__ = [
    "Instance",
    "ParamGradients",
    "ParamSet",
    "SceneSpec",
    "TrainConfig",
    "TrainingResult",
    "evaluate_corpus",
    "gen_synthetic",
    "grad_params",
    "init_params",
    "load_corpus",
    "load_params",
    "numerical_gradients",
    "pixelwise_loss",
    "read_scene_spec",
    "save_corpus",
    "save_params",
    "train_incremental",
    "write_loss_trace_csv",
]
