# SPDX-License-Identifier: GPL-3.0-or-later
"""
Segmentation metrics: mIoU, tagging, localization and boundary accuracy.
"""

from triple_mrf.metrics.boundary import boundary_accuracy
from triple_mrf.metrics.localization import localization_accuracy
from triple_mrf.metrics.report import EvalReport, evaluate_pairs, write_report_csv
from triple_mrf.metrics.segmentation import confusion_counts, miou, tagging_accuracy

__all__ = [
    "EvalReport",
    "boundary_accuracy",
    "confusion_counts",
    "evaluate_pairs",
    "localization_accuracy",
    "miou",
    "tagging_accuracy",
    "write_report_csv",
]
