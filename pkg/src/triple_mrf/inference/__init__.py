# SPDX-License-Identifier: GPL-3.0-or-later
"""
Mean field inference used as the reference for the layer stack.
"""

from triple_mrf.inference.meanfield import (
    MfSchedule,
    mf_init,
    mf_update_cooccurrence,
    mf_update_generic,
    mf_update_triple,
    reduce_to_cooccurrence,
    run_mf,
    write_trace_csv,
)
from triple_mrf.inference.pairwise import (
    CooccurrenceModel,
    DensePairwise,
    PairwiseModel,
    TriplePenaltyModel,
)

__all__ = [
    "CooccurrenceModel",
    "DensePairwise",
    "MfSchedule",
    "PairwiseModel",
    "TriplePenaltyModel",
    "mf_init",
    "mf_update_cooccurrence",
    "mf_update_generic",
    "mf_update_triple",
    "reduce_to_cooccurrence",
    "run_mf",
    "write_trace_csv",
]
