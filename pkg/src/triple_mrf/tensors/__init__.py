# SPDX-License-Identifier: GPL-3.0-or-later
"""
Dense tensor files and geometric utilities.
"""

from triple_mrf.tensors.dpt import (
    read_label_map,
    read_tensor,
    write_label_map,
    write_tensor,
)
from triple_mrf.tensors.resize import bilinear_resize

__all__ = [
    "bilinear_resize",
    "read_label_map",
    "read_tensor",
    "write_label_map",
    "write_tensor",
]
