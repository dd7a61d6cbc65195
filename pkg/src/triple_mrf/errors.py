# SPDX-License-Identifier: GPL-3.0-or-later
"""
Exceptions raised across triple-mrf.
"""


class ShapeMismatchError(ValueError):
    """
    Raised when operands of an operation disagree in shape.
    """


class InvalidParameterError(ValueError):
    """
    Raised when an argument violates an operation's precondition.
    """


class LabelRangeError(ValueError):
    """
    Raised when a label index falls outside of [0, l).
    """


class ImpossibleSceneError(ValueError):
    """
    Raised when a synthetic scene grammar cannot be satisfied.
    """


# MARK: DPT Format


class DptFormatError(ValueError):
    """
    Base class for malformed DPT tensor files.

    Each subclass carries a stable ``code`` so scripts can tell failures apart.
    """

    code = "dpt_format"

    def __init__(self, message: str, path=None) -> None:
        """
        Parameters
        ----------
        message : str
            The error message.

        path : str or Path, optional
            The file that failed to parse.
        """
        self.message = message
        self.path = path
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.path is None:
            return f"[{self.code}] {self.message}"

        return f"{self.path} : [{self.code}] {self.message}"


class BadMagicError(DptFormatError):
    code = "bad_magic"


class PayloadMismatchError(DptFormatError):
    code = "payload_mismatch"


class NonFiniteValueError(DptFormatError):
    code = "non_finite"


class UnsupportedRankError(DptFormatError):
    code = "bad_rank"


class NonIntegralLabelError(DptFormatError):
    code = "non_integral"


# MARK: Learning


class TrainingDivergedError(RuntimeError):
    """
    Raised when the training loss stops being finite.
    """

    def __init__(self, stage: str, step: int, last_finite_loss: float) -> None:
        """
        Parameters
        ----------
        stage : str
            The training stage that diverged.

        step : int
            The step at which the loss became non-finite.

        last_finite_loss : float
            The last loss value that was still finite.
        """
        self.stage = stage
        self.step = step
        self.last_finite_loss = last_finite_loss
        super().__init__(
            f"Loss diverged in stage '{stage}' at step {step} "
            f"(last finite loss: {last_finite_loss:.6g}). Try a smaller learning rate."
        )


class CostOverflowError(OverflowError):
    """
    Raised when an operation count no longer fits in an unsigned 64-bit integer.
    """
