# SPDX-License-Identifier: GPL-3.0-or-later
"""
Filtering layers that compute one mean field iteration.
"""

from triple_mrf.layers.context import dominant_offsets, label_compatibility
from triple_mrf.layers.cost import CostModelReport, estimate_cost
from triple_mrf.layers.dpn import (
    LayerActivations,
    block_min_b14,
    combine_b15,
    context_conv_b13,
    dpn_forward,
    dump_activations,
)
from triple_mrf.layers.kernels import (
    TriplePenaltyKernelField,
    build_triple_kernels,
    lconv_b12,
)
from triple_mrf.layers.lut import distance_lut, lconv_b12_lut

__all__ = [
    "CostModelReport",
    "LayerActivations",
    "TriplePenaltyKernelField",
    "block_min_b14",
    "build_triple_kernels",
    "combine_b15",
    "context_conv_b13",
    "distance_lut",
    "dominant_offsets",
    "dpn_forward",
    "dump_activations",
    "estimate_cost",
    "label_compatibility",
    "lconv_b12",
    "lconv_b12_lut",
]
