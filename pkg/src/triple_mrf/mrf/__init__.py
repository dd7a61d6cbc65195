# SPDX-License-Identifier: GPL-3.0-or-later
"""
The MRF model: domain types, distances and energies.
"""

from triple_mrf.mrf.energy import (
    cooccurrence_energy,
    distance,
    energy,
    free_energy,
    one_hot,
)
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    LabelSpace,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
)

__all__ = [
    "ContextFilterBank",
    "DistanceParams",
    "LabelSpace",
    "PixelFeatureGrid",
    "TripleWindow",
    "UnaryField",
    "cooccurrence_energy",
    "distance",
    "energy",
    "free_energy",
    "one_hot",
]
