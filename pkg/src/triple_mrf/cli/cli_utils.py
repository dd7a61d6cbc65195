# SPDX-License-Identifier: GPL-3.0-or-later
"""
Utility functions for the triple-mrf CLI: argument types, run configuration and inputs.
"""

import argparse
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.learning.params import (
    DEFAULT_STAGE_SEQUENCE,
    INIT_KINDS,
    ParamSet,
    check_stage,
    init_params,
    load_params,
)
from triple_mrf.mrf.model import LabelSpace, PixelFeatureGrid, UnaryField
from triple_mrf.tensors.dpt import read_tensor
from triple_mrf.utils import check_odd_window, read_key_values

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# MARK: Argument Types


def check_positive_int(value: str) -> int:
    """
    Argument type for integers of at least one.
    """
    try:
        number = int(value)

    except ValueError as error:
        raise argparse.ArgumentTypeError(f"{value} is not an integer.") from error

    if number < 1:
        raise argparse.ArgumentTypeError(f"{value} must be a positive integer.")

    return number


def check_non_negative_int(value: str) -> int:
    try:
        number = int(value)

    except ValueError as error:
        raise argparse.ArgumentTypeError(f"{value} is not an integer.") from error

    if number < 0:
        raise argparse.ArgumentTypeError(f"{value} must not be negative.")

    return number


def check_odd_int(value: str) -> int:
    """
    Argument type for window extents, which must be positive and odd.
    """
    number = check_positive_int(value)
    if number % 2 == 0:
        raise argparse.ArgumentTypeError(f"{value} must be odd; try {number - 1} or {number + 1}.")

    return number


def parse_bool(value: str) -> bool:
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True

    if lowered in ("0", "false", "no", "off"):
        return False

    raise InvalidParameterError(f"Expected a boolean, got '{value}'.")


# MARK: Run Config


@dataclass(frozen=True)
class RunConfig:
    """
    Settings shared by the commands, merged from defaults, a config file and flags.

    Parameters
    ----------
    unary : Path, optional
        The H×W×l unary tensor.

    features : Path, optional
        The H×W×C intensity tensor; zero intensities when missing.

    params : Path, optional
        A parameter directory; its values replace the model hyperparameters below.

    output : Path, optional
        Output file or directory of the command.

    num_labels : int, optional
        The number of labels l; inferred from the inputs when missing.

    num_components : int (default=1)
        The mixture size K.

    window : int (default=3)
        The triple window m.

    context_size : int (default=3)
        The context window n.

    omega1 : float (default=0.0)
        Intensity weight of the distance.

    omega2 : float (default=1.0)
        Spatial weight of the distance.

    a : float (default=1.0)
        Slope of the linear activation.

    b : float (default=0.0)
        Offset of the linear activation.

    ignore_label : int, optional
        Ground truth label left out of losses and metrics.

    threads : int (default=1)
        Worker threads over images, or over row bands of the context filtering in refine.

    lut : bool (default=False)
        Build the locally convolutional kernels through lookup tables.

    verbose : bool (default=False)
        Debug logging and progress bars.

    seed : int (default=0)
        Seed of every random draw.

    learning_rate : float (default=0.1)
        Step size of training.

    iterations : int, optional
        Training steps per stage or mean field passes; each command has its own default.

    batch_size : int (default=8)
        Training images per step.

    stages : str
        Comma separated training stages.

    init : str (default=zero)
        Initialization of the context costs when training without --params.

    init_scale : float (default=1.0)
        Magnitude of potts or random initial costs.
    """

    unary: Path = None
    features: Path = None
    params: Path = None
    output: Path = None
    num_labels: int = None
    num_components: int = 1
    window: int = 3
    context_size: int = 3
    omega1: float = 0.0
    omega2: float = 1.0
    a: float = 1.0
    b: float = 0.0
    ignore_label: int = None
    threads: int = 1
    lut: bool = False
    verbose: bool = False
    seed: int = 0
    learning_rate: float = 0.1
    iterations: int = None
    batch_size: int = 8
    stages: str = ",".join(DEFAULT_STAGE_SEQUENCE)
    init: str = "zero"
    init_scale: float = 1.0

    def __post_init__(self) -> None:
        check_odd_window(self.window, "m")
        check_odd_window(self.context_size, "n")
        if self.num_labels is not None:
            LabelSpace(self.num_labels)

        if self.num_components < 1:
            raise InvalidParameterError(f"K must be at least 1, got {self.num_components}.")

        if self.threads < 1 or self.batch_size < 1:
            raise InvalidParameterError("Threads and batch size must be positive.")

        if self.iterations is not None and self.iterations < 1:
            raise InvalidParameterError(f"Iterations must be positive, got {self.iterations}.")

        if self.omega1 < 0 or self.omega2 < 0:
            raise InvalidParameterError("Distance weights omega1 and omega2 must be non-negative.")

        if self.init not in INIT_KINDS:
            raise InvalidParameterError(
                f"Unknown initialization '{self.init}'. Choose from: {', '.join(INIT_KINDS)}."
            )

        for stage in self.stage_sequence:
            check_stage(stage)

    @property
    def stage_sequence(self) -> Tuple[str, ...]:
        return tuple(stage.strip() for stage in self.stages.split(",") if stage.strip())


CONFIG_CONVERTERS = {
    "unary": Path,
    "features": Path,
    "params": Path,
    "output": Path,
    "num_labels": int,
    "num_components": int,
    "window": int,
    "context_size": int,
    "omega1": float,
    "omega2": float,
    "a": float,
    "b": float,
    "ignore_label": int,
    "threads": int,
    "lut": parse_bool,
    "verbose": parse_bool,
    "seed": int,
    "learning_rate": float,
    "iterations": int,
    "batch_size": int,
    "stages": str,
    "init": str,
    "init_scale": float,
}


def read_config_file(path) -> Dict[str, object]:
    """
    Read RunConfig values from a key=value file.

    Keys are field names of RunConfig and may use dashes instead of underscores.

    Parameters
    ----------
    path : str or Path
        The config file.

    Returns
    -------
    dict
        Converted values by field name.
    """
    values = {}
    for key, value in read_key_values(path).items():
        name = key.replace("-", "_")
        if name not in CONFIG_CONVERTERS:
            raise InvalidParameterError(f"{path}: unknown config key '{key}'.")

        try:
            values[name] = CONFIG_CONVERTERS[name](value)

        except ValueError as error:
            raise InvalidParameterError(f"{path}: bad value '{value}' for '{key}'.") from error

    return values


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the config file named by --config with the flags given on the command line.

    Flags win over the file and the file wins over the RunConfig defaults.

    Parameters
    ----------
    args : argparse.Namespace
        The parsed arguments; unset flags are None.

    Returns
    -------
    RunConfig
        The merged configuration.
    """
    values = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        values.update(read_config_file(config_path))
        logger.debug("Read %d settings from %s", len(values), config_path)

    for config_field in fields(RunConfig):
        flag = getattr(args, config_field.name, None)
        if flag is not None:
            values[config_field.name] = flag

    return RunConfig(**values)


# MARK: Inputs


def load_inputs(config: RunConfig) -> Tuple[UnaryField, PixelFeatureGrid]:
    """
    Read the unary field and the pixel features named by a config.
    """
    if config.unary is None:
        raise InvalidParameterError("A unary tensor is required; pass --unary.")

    unary = UnaryField(read_tensor(config.unary))
    if config.num_labels is not None and unary.num_labels != config.num_labels:
        raise ShapeMismatchError(
            f"{config.unary} has {unary.num_labels} labels, expected {config.num_labels}."
        )

    if config.features is None:
        logger.debug("No features given; using zero intensities.")
        feats = PixelFeatureGrid(np.zeros(unary.shape))

    else:
        feats = PixelFeatureGrid(read_tensor(config.features))

    return unary, feats


def resolve_params(config: RunConfig, num_labels: int, kind: str = "zero") -> ParamSet:
    """
    Load the parameter directory of a config or build parameters from its hyperparameters.

    Parameters
    ----------
    config : RunConfig
        The run configuration.

    num_labels : int
        The number of labels of the inputs.

    kind : str (default=zero)
        Initialization of the context costs when no directory is given.

    Returns
    -------
    ParamSet
        The parameters.
    """
    if config.params is not None:
        params = load_params(config.params)
        if params.num_labels != num_labels:
            raise ShapeMismatchError(
                f"Parameters in {config.params} have {params.num_labels} labels, the inputs "
                f"have {num_labels}."
            )

        logger.debug("Loaded %r", params)

        return params

    return init_params(
        num_labels,
        num_components=config.num_components,
        context_size=config.context_size,
        window=config.window,
        omega1=config.omega1,
        omega2=config.omega2,
        kind=kind,
        scale=config.init_scale,
        seed=config.seed,
        a=config.a,
        b=config.b,
    )
