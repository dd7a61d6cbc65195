# SPDX-License-Identifier: GPL-3.0-or-later
"""
Operation counts of the smoothness head.
"""

from dataclasses import dataclass

from triple_mrf.errors import CostOverflowError, InvalidParameterError

MAX_COUNT = 2**64 - 1


def format_count(count: int) -> str:
    """
    Render a count as a mantissa with three decimals and a power of ten, e.g. 1.376×10^11.
    """
    mantissa, exponent = f"{count:.3e}".split("e")

    return f"{mantissa}×10^{int(exponent)}"


def _checked_product(*factors: int) -> int:
    product = 1
    for factor in factors:
        product *= factor
        if product > MAX_COUNT:
            raise CostOverflowError(
                f"Operation count {' · '.join(str(f) for f in factors)} exceeds 2^64 - 1."
            )

    return product


@dataclass(frozen=True)
class CostModelReport:
    """
    Multiply-accumulate counts per layer for f labels, f' context components, an N×N
    image, s×s locally convolutional kernels and a batch of M images.
    """

    f: int
    f_prime: int
    n: int
    s: int
    m: int
    b12: int
    b13: int
    b14: int
    b15: int

    @property
    def total(self) -> int:
        total = self.b12 + self.b13 + self.b14 + self.b15
        if total > MAX_COUNT:
            raise CostOverflowError(f"Total operation count {total} exceeds 2^64 - 1.")

        return total

    def estimated_seconds(self, ops_per_second: float) -> float:
        """
        Wall-clock estimate of the total count at a given throughput.

        Parameters
        ----------
        ops_per_second : float
            Sustained operations per second.

        Returns
        -------
        float
            The estimated seconds.
        """
        if not ops_per_second > 0:
            raise InvalidParameterError(
                f"Throughput must be positive, got {ops_per_second}."
            )

        return self.total / ops_per_second

    def lines(self):
        return [
            ("b12", self.b12),
            ("b13", self.b13),
            ("b14", self.b14),
            ("b15", self.b15),
            ("total", self.total),
        ]

    def __str__(self) -> str:
        header = f"f={self.f} f'={self.f_prime} N={self.n} s={self.s} M={self.m}"
        rows = [f"{name}: {count} ({format_count(count)})" for name, count in self.lines()]

        return "\n".join([header, *rows])


def estimate_cost(f: int, f_prime: int, n: int, s: int, m: int) -> CostModelReport:
    """
    Count the operations of each layer of the smoothness head.

    Parameters
    ----------
    f : int
        Number of label channels.

    f_prime : int
        Number of context components per label.

    n : int
        Image side length N.

    s : int
        Side length of the locally convolutional kernels.

    m : int
        Batch size M.

    Returns
    -------
    CostModelReport
        b12 = f N^2 s^2 M, b13 = f f' N^2 s^2 M, b14 = b15 = f N^2 M.

    Raises
    ------
    InvalidParameterError
        If an argument is not a positive integer.

    CostOverflowError
        If a count exceeds the unsigned 64-bit range.
    """
    for name, value in (("f", f), ("f'", f_prime), ("N", n), ("s", s), ("M", m)):
        if isinstance(value, bool) or int(value) != value or value < 1:
            raise InvalidParameterError(f"{name} must be a positive integer, got {value}.")

    f, f_prime, n, s, m = (int(v) for v in (f, f_prime, n, s, m))

    report = CostModelReport(
        f=f,
        f_prime=f_prime,
        n=n,
        s=s,
        m=m,
        b12=_checked_product(f, n, n, s, s, m),
        b13=_checked_product(f, f_prime, n, n, s, s, m),
        b14=_checked_product(f, n, n, m),
        b15=_checked_product(f, n, n, m),
    )
    report.total  # raises when the sum overflows

    return report
