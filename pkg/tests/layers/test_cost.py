# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for the operation counts of the smoothness head.
"""

import pytest

from triple_mrf.errors import CostOverflowError, InvalidParameterError
from triple_mrf.layers.cost import estimate_cost, format_count


def test_reference_configuration():
    report = estimate_cost(21, 5, 512, 50, 10)

    assert report.b12 == 137_625_600_000
    assert report.b13 == 688_128_000_000
    assert report.b14 == report.b15 == 55_050_240
    assert report.total == 825_863_700_480
    assert format_count(report.b12) == "1.376×10^11"
    assert "b12: 137625600000 (1.376×10^11)" in str(report)


def test_unit_kernel_side():
    report = estimate_cost(3, 2, 4, 1, 1)

    assert report.b12 == report.b14 == 48
    assert report.b13 == 96


def test_overflow_is_reported():
    with pytest.raises(CostOverflowError):
        estimate_cost(2**20, 2**20, 2**12, 2**6, 1)


@pytest.mark.parametrize(
    "args",
    [
        (21, 5, 512, 50, 0),
        (0, 5, 512, 50, 10),
        (21, -1, 512, 50, 10),
        (21, 5, 512.5, 50, 10),
        (True, 5, 512, 50, 10),
    ],
)
def test_rejects_non_positive_arguments(args):
    with pytest.raises(InvalidParameterError):
        estimate_cost(*args)


@pytest.mark.parametrize("position", range(5))
def test_counts_grow_with_every_argument(position):
    base = [4, 3, 16, 5, 2]
    bigger = list(base)
    bigger[position] += 1

    small, large = estimate_cost(*base), estimate_cost(*bigger)

    assert large.total >= small.total
    for (_, before), (_, after) in zip(small.lines(), large.lines()):
        assert after >= before


def test_estimated_seconds():
    report = estimate_cost(1, 1, 1, 1, 1)

    assert report.estimated_seconds(2.0) == pytest.approx(2.0)
    with pytest.raises(InvalidParameterError):
        report.estimated_seconds(0.0)
