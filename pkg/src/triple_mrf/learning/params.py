# SPDX-License-Identifier: GPL-3.0-or-later
"""
Learnable parameters of the smoothness head, training stages and their serialization.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.mrf.model import ContextFilterBank, DistanceParams, LabelSpace, TripleWindow
from triple_mrf.tensors.dpt import read_tensor, write_tensor
from triple_mrf.utils import CONTEXT_TENSOR_FILE, PARAMS_META_FILE, read_key_values

logger = logging.getLogger(__name__)

# MARK: Stages

UNARY_PASSTHROUGH = "unary-passthrough"
TRIPLE = "triple"
CONTEXT = "context"
JOINT = "joint"

STAGES = (UNARY_PASSTHROUGH, TRIPLE, CONTEXT, JOINT)
DEFAULT_STAGE_SEQUENCE = STAGES

PARAMETER_NAMES = ("omega1", "omega2", "a", "b", "mu")

STAGE_LIVE_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    UNARY_PASSTHROUGH: (),
    TRIPLE: ("omega1", "omega2", "a", "b"),
    CONTEXT: ("mu",),
    JOINT: PARAMETER_NAMES,
}

INIT_KINDS = ("zero", "potts", "random")


def check_stage(stage: str) -> str:
    if stage not in STAGES:
        raise InvalidParameterError(
            f"Unknown stage '{stage}'. Choose from: {', '.join(STAGES)}."
        )

    return stage


def live_parameters(stage: str) -> Tuple[str, ...]:
    """
    Names of the parameters a stage updates; every other parameter stays frozen.
    """
    return STAGE_LIVE_PARAMETERS[check_stage(stage)]


# MARK: Parameters


@dataclass(frozen=True, repr=False)
class ParamSet:
    """
    Distance weights, linear activation, context bank and triple window of the head.
    """

    dp: DistanceParams
    a: float
    b: float
    ctx: ContextFilterBank
    tw: TripleWindow

    @property
    def num_labels(self) -> int:
        return self.ctx.num_labels

    def equals(self, other: "ParamSet") -> bool:
        """
        Bitwise equality of every parameter.
        """
        return (
            self.dp == other.dp
            and self.a == other.a
            and self.b == other.b
            and self.tw == other.tw
            and np.array_equal(self.ctx.costs, other.ctx.costs)
        )

    def step(self, grads: "ParamGradients", learning_rate: float, stage: str) -> "ParamSet":
        """
        One gradient descent step on the parameters live in a stage.

        Parameters
        ----------
        grads : ParamGradients
            Gradients of the loss.

        learning_rate : float
            The step size.

        stage : str
            Selects the live parameters; weights are projected onto [0, inf).

        Returns
        -------
        ParamSet
            The updated parameters; frozen entries are the same objects as before.
        """
        live = live_parameters(stage)
        updated = self

        if "omega1" in live or "omega2" in live:
            omega1 = self.dp.omega1
            omega2 = self.dp.omega2
            if "omega1" in live:
                omega1 = max(0.0, omega1 - learning_rate * grads.omega1)

            if "omega2" in live:
                omega2 = max(0.0, omega2 - learning_rate * grads.omega2)

            updated = replace(updated, dp=DistanceParams(omega1, omega2))

        if "a" in live:
            updated = replace(updated, a=self.a - learning_rate * grads.a)

        if "b" in live:
            updated = replace(updated, b=self.b - learning_rate * grads.b)

        if "mu" in live:
            updated = replace(
                updated, ctx=ContextFilterBank(self.ctx.costs - learning_rate * grads.mu)
            )

        return updated

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(omega1={self.dp.omega1:.6g}, "
            f"omega2={self.dp.omega2:.6g}, a={self.a:.6g}, b={self.b:.6g}, "
            f"K={self.ctx.num_components}, n={self.ctx.size}, m={self.tw.size}, "
            f"l={self.ctx.num_labels})"
        )


@dataclass(frozen=True)
class ParamGradients:
    """
    Gradients of the loss with respect to each parameter class.
    """

    omega1: float
    omega2: float
    a: float
    b: float
    mu: np.ndarray

    @classmethod
    def zeros_like(cls, params: ParamSet) -> "ParamGradients":
        return cls(0.0, 0.0, 0.0, 0.0, np.zeros_like(params.ctx.costs))

    def masked(self, stage: str) -> "ParamGradients":
        """
        A copy with every parameter frozen in the stage set exactly to zero.
        """
        live = live_parameters(stage)

        return ParamGradients(
            omega1=self.omega1 if "omega1" in live else 0.0,
            omega2=self.omega2 if "omega2" in live else 0.0,
            a=self.a if "a" in live else 0.0,
            b=self.b if "b" in live else 0.0,
            mu=self.mu if "mu" in live else np.zeros_like(self.mu),
        )

    def __add__(self, other: "ParamGradients") -> "ParamGradients":
        return ParamGradients(
            self.omega1 + other.omega1,
            self.omega2 + other.omega2,
            self.a + other.a,
            self.b + other.b,
            self.mu + other.mu,
        )

    def scaled(self, factor: float) -> "ParamGradients":
        return ParamGradients(
            self.omega1 * factor,
            self.omega2 * factor,
            self.a * factor,
            self.b * factor,
            self.mu * factor,
        )


def init_params(
    num_labels: int,
    num_components: int = 1,
    context_size: int = 3,
    window: int = 3,
    omega1: float = 0.0,
    omega2: float = 1.0,
    kind: str = "zero",
    scale: float = 1.0,
    seed: int = 0,
    a: float = 1.0,
    b: float = 0.0,
) -> ParamSet:
    """
    Initial parameters of the smoothness head.

    Parameters
    ----------
    num_labels : int
        The number of labels l.

    num_components : int (default=1)
        The mixture size K.

    context_size : int (default=3)
        The context window n.

    window : int (default=3)
        The triple window m.

    omega1 : float (default=0.0)
        Intensity weight of the distance.

    omega2 : float (default=1.0)
        Spatial weight of the distance.

    kind : str (default=zero)
        "zero" for an inert context, "potts" for -scale on every same-label entry and
        "random" for normal costs with standard deviation scale.

    scale : float (default=1.0)
        Magnitude of the potts or random costs.

    seed : int (default=0)
        Seed of the random costs.

    a : float (default=1.0)
        Slope of the linear activation.

    b : float (default=0.0)
        Offset of the linear activation.

    Returns
    -------
    ParamSet
        The parameters.
    """
    LabelSpace(num_labels)
    if num_components < 1:
        raise InvalidParameterError(f"K must be at least 1, got {num_components}.")

    if kind not in INIT_KINDS:
        raise InvalidParameterError(
            f"Unknown initialization '{kind}'. Choose from: {', '.join(INIT_KINDS)}."
        )

    shape = (num_components, num_labels, context_size, context_size, num_labels)
    if kind == "random":
        costs = np.random.default_rng(seed).normal(0.0, scale, size=shape)

    else:
        costs = np.zeros(shape)
        if kind == "potts":
            labels = np.arange(num_labels)
            costs[:, labels, :, :, labels] = -scale

    return ParamSet(
        dp=DistanceParams(float(omega1), float(omega2)),
        a=float(a),
        b=float(b),
        ctx=ContextFilterBank(costs),
        tw=TripleWindow(window),
    )


# MARK: Files


def save_params(params: ParamSet, directory) -> Path:
    """
    Write parameters as ``context.dpt`` and a key=value ``params.meta``.

    Parameters
    ----------
    params : ParamSet
        The parameters to save.

    directory : str or Path
        The output directory, created if needed.

    Returns
    -------
    Path
        The directory.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_tensor(params.ctx.to_tensor(), directory / CONTEXT_TENSOR_FILE)

    meta = {
        "omega1": repr(params.dp.omega1),
        "omega2": repr(params.dp.omega2),
        "a": repr(params.a),
        "b": repr(params.b),
        "K": params.ctx.num_components,
        "n": params.ctx.size,
        "m": params.tw.size,
        "l": params.ctx.num_labels,
    }
    with (directory / PARAMS_META_FILE).open("w", encoding="utf-8") as file:
        for key, value in meta.items():
            file.write(f"{key}={value}\n")

    logger.info("Saved parameters to %s", directory)

    return directory


def load_params(directory) -> ParamSet:
    """
    Read parameters written by save_params.

    Parameters
    ----------
    directory : str or Path
        The parameter directory.

    Returns
    -------
    ParamSet
        The parameters.

    Raises
    ------
    FileNotFoundError
        If the directory or one of its files is missing.

    ShapeMismatchError
        If the context tensor disagrees with the metadata.
    """
    directory = Path(directory)
    meta_path = directory / PARAMS_META_FILE
    if not meta_path.is_file():
        raise FileNotFoundError(f"No {PARAMS_META_FILE} found in {directory}.")

    meta = read_key_values(meta_path)
    missing = [key for key in ("omega1", "omega2", "a", "b", "K", "n", "m", "l") if key not in meta]
    if missing:
        raise InvalidParameterError(f"{meta_path} lacks keys: {', '.join(missing)}.")

    ctx = ContextFilterBank.from_tensor(read_tensor(directory / CONTEXT_TENSOR_FILE), int(meta["K"]))
    if ctx.size != int(meta["n"]) or ctx.num_labels != int(meta["l"]):
        raise ShapeMismatchError(
            f"Context tensor {ctx!r} disagrees with n={meta['n']}, l={meta['l']} in {meta_path}."
        )

    return ParamSet(
        dp=DistanceParams(float(meta["omega1"]), float(meta["omega2"])),
        a=float(meta["a"]),
        b=float(meta["b"]),
        ctx=ctx,
        tw=TripleWindow(int(meta["m"])),
    )
