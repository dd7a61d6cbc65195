# SPDX-License-Identifier: GPL-3.0-or-later
"""
Domain types of the MRF: label space, pixel features, distances, unaries and contexts.
"""

from dataclasses import dataclass

import numpy as np

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.utils import EPSILON, check_odd_window, clamp_and_normalize


@dataclass(frozen=True)
class LabelSpace:
    """
    The set of l labels {0, ..., l - 1}.
    """

    num_labels: int

    def __post_init__(self) -> None:
        if self.num_labels < 2:
            raise InvalidParameterError(
                f"A label space needs at least 2 labels, got {self.num_labels}."
            )


@dataclass(frozen=True)
class DistanceParams:
    """
    Weights of the pixel distance d(i, j) = omega1 |I_i - I_j|^2 + omega2 |pos_i - pos_j|^2.
    """

    omega1: float = 0.0
    omega2: float = 1.0

    def __post_init__(self) -> None:
        for name in ("omega1", "omega2"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidParameterError(
                    f"Distance weight {name} must be finite and non-negative, got {value}."
                )


@dataclass(frozen=True)
class TripleWindow:
    """
    The m×m neighborhood N_j of the triple penalty.
    """

    size: int = 3

    def __post_init__(self) -> None:
        check_odd_window(self.size, "m")

    @property
    def radius(self) -> int:
        return self.size // 2


@dataclass(frozen=True, repr=False)
class PixelFeatureGrid:
    """
    Per-pixel intensities (H×W×C, values in [0, 255]); coordinates are implicit.
    """

    intensity: np.ndarray

    def __post_init__(self) -> None:
        intensity = np.array(self.intensity, dtype=np.float64)
        if intensity.ndim == 2:
            intensity = intensity[:, :, None]

        if intensity.ndim != 3:
            raise ShapeMismatchError(
                f"Pixel features must be H×W×C, got shape {intensity.shape}."
            )

        if np.any(intensity < 0) or np.any(intensity > 255) or not np.all(np.isfinite(intensity)):
            raise InvalidParameterError("Pixel intensities must lie within [0, 255].")

        intensity.setflags(write=False)
        object.__setattr__(self, "intensity", intensity)

    @property
    def shape(self):
        return self.intensity.shape[:2]

    @property
    def is_integral(self) -> bool:
        return bool(np.all(self.intensity == np.round(self.intensity)))

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(shape={self.intensity.shape})"


@dataclass(frozen=True, repr=False)
class UnaryField:
    """
    Unary probabilities p_i^u, clamped below at EPSILON and renormalized per pixel.
    """

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if probabilities.ndim != 3:
            raise ShapeMismatchError(
                f"Unary fields must be H×W×l, got shape {probabilities.shape}."
            )

        LabelSpace(probabilities.shape[2])
        if not np.all(np.isfinite(probabilities)) or np.any(probabilities < 0):
            raise InvalidParameterError("Unary probabilities must be finite and non-negative.")

        probabilities = clamp_and_normalize(probabilities)
        probabilities.setflags(write=False)
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def shape(self):
        return self.probabilities.shape[:2]

    @property
    def num_labels(self) -> int:
        return self.probabilities.shape[2]

    @property
    def potentials(self) -> np.ndarray:
        """
        The unary costs Phi_i^u = -ln p_i^u.
        """
        return -np.log(np.maximum(self.probabilities, EPSILON))

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(shape={self.probabilities.shape})"


@dataclass(frozen=True, repr=False)
class ContextFilterBank:
    """
    Mixture of K label-context cost tables.

    ``costs[k, u, a, b, v]`` is the cost mu_k of target label u at the centre when the
    pixel at offset (a - n // 2, b - n // 2) takes label v. Negative costs act as rewards.
    """

    costs: np.ndarray

    def __post_init__(self) -> None:
        costs = np.array(self.costs, dtype=np.float64)
        if costs.ndim != 5:
            raise ShapeMismatchError(
                f"Context banks are K×l×n×n×l, got shape {costs.shape}."
            )

        num_components, num_labels, rows, cols, source_labels = costs.shape
        if rows != cols or num_labels != source_labels:
            raise ShapeMismatchError(
                f"Context banks are K×l×n×n×l, got shape {costs.shape}."
            )

        check_odd_window(rows, "n")
        if not np.all(np.isfinite(costs)):
            raise InvalidParameterError("Context costs must be finite.")

        costs.setflags(write=False)
        object.__setattr__(self, "costs", costs)

    @classmethod
    def zeros(cls, num_components: int, num_labels: int, size: int) -> "ContextFilterBank":
        return cls(np.zeros((num_components, num_labels, size, size, num_labels)))

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, num_components: int) -> "ContextFilterBank":
        """
        Build a bank from its [K·l, n, n, l] component-major tensor.

        Parameters
        ----------
        tensor : np.ndarray
            The serialized bank.

        num_components : int
            The mixture size K.

        Returns
        -------
        ContextFilterBank
            The bank.
        """
        tensor = np.asarray(tensor, dtype=np.float64)
        if tensor.ndim != 4 or tensor.shape[0] % num_components:
            raise ShapeMismatchError(
                f"Cannot split a bank of dims {list(tensor.shape)} into {num_components} components."
            )

        num_labels = tensor.shape[0] // num_components
        size = tensor.shape[1]

        return cls(tensor.reshape(num_components, num_labels, size, size, tensor.shape[3]))

    def to_tensor(self) -> np.ndarray:
        return self.costs.reshape(
            self.num_components * self.num_labels, self.size, self.size, self.num_labels
        )

    @property
    def num_components(self) -> int:
        return self.costs.shape[0]

    @property
    def num_labels(self) -> int:
        return self.costs.shape[1]

    @property
    def size(self) -> int:
        return self.costs.shape[2]

    @property
    def radius(self) -> int:
        return self.size // 2

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(K={self.num_components}, l={self.num_labels}, "
            f"n={self.size})"
        )


def check_compatible(unary: UnaryField, feats: PixelFeatureGrid = None, ctx: ContextFilterBank = None) -> None:
    """
    Raise ShapeMismatchError unless unaries, features and context bank agree.

    Parameters
    ----------
    unary : UnaryField
        The unary field defining H, W and l.

    feats : PixelFeatureGrid, optional
        Features that must share H×W.

    ctx : ContextFilterBank, optional
        A bank that must share l.
    """
    if feats is not None and tuple(feats.shape) != tuple(unary.shape):
        raise ShapeMismatchError(
            f"Feature grid {tuple(feats.shape)} does not match unary field {tuple(unary.shape)}."
        )

    if ctx is not None and ctx.num_labels != unary.num_labels:
        raise ShapeMismatchError(
            f"Context bank has {ctx.num_labels} labels, unary field has {unary.num_labels}."
        )
