# SPDX-License-Identifier: GPL-3.0-or-later
"""
Function to print the operation counts of the smoothness head.
"""

from rich import print as rprint

from triple_mrf.layers.cost import CostModelReport, estimate_cost


def cost_wrapper(
    f: int, f_prime: int, n: int, s: int, m: int, ops_per_second: float = None
) -> CostModelReport:
    """
    Print the per-layer operation counts and optionally a runtime estimate.

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

    ops_per_second : float, optional
        Throughput used for the runtime estimate.

    Returns
    -------
    CostModelReport
        The counts.
    """
    report = estimate_cost(f, f_prime, n, s, m)
    rprint(str(report))

    if ops_per_second is not None:
        rprint(
            f"Estimated time at {ops_per_second:.3g} ops/s: "
            f"{report.estimated_seconds(ops_per_second):.3f} s"
        )

    return report
