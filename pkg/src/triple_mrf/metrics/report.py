# SPDX-License-Identifier: GPL-3.0-or-later
"""
Corpus evaluation report combining mIoU, TA, LA and BA.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Tuple

import numpy as np
from tqdm.auto import tqdm

from triple_mrf.metrics.boundary import DEFAULT_TOLERANCE, boundary_accuracy
from triple_mrf.metrics.localization import localization_accuracy
from triple_mrf.metrics.segmentation import (
    TAG_THRESHOLD,
    ConfusionCounts,
    confusion_counts,
    iou_from_counts,
    tagging_accuracy,
)
from triple_mrf.utils import parallel_map

logger = logging.getLogger(__name__)

LabelPair = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, repr=False)
class EvalReport:
    """
    Metrics of a set of predictions against their ground truth.

    Parameters
    ----------
    iou : np.ndarray
        IoU per class from counts pooled over images.

    miou : float
        Mean of iou over the classes present in a prediction or the ground truth.

    ta : float
        Tagging accuracy averaged over images.

    biou : np.ndarray
        Box IoU per class averaged over the images where the class has components.

    la : float
        Mean of biou over classes.

    ba_per_class : np.ndarray
        Boundary F1 per class averaged over the images where the class is localized.

    ba : float
        Mean of ba_per_class over classes.

    counts : ConfusionCounts
        Pooled TP, FP and FN pixel counts per class.

    images : int
        Number of evaluated images.
    """

    iou: np.ndarray
    miou: float
    ta: float
    biou: np.ndarray
    la: float
    ba_per_class: np.ndarray
    ba: float
    counts: ConfusionCounts
    images: int

    @property
    def num_labels(self) -> int:
        return len(self.iou)

    def summary(self) -> str:
        return (
            f"mIoU={self.miou:.6f} TA={self.ta:.6f} LA={self.la:.6f} BA={self.ba:.6f} "
            f"images={self.images}"
        )

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.summary()})"


def _nanmean(values: np.ndarray, axis: int = None):
    """
    Mean ignoring NaN entries; NaN where every entry is NaN.
    """
    present = ~np.isnan(values)
    total = np.where(present, values, 0.0).sum(axis=axis)
    count = present.sum(axis=axis)

    return np.where(count > 0, total / np.maximum(count, 1), np.nan)


def _evaluate_image(
    pair: LabelPair, num_labels: int, tolerance: int, ignore_label: int, threshold: float
):
    pred, gt = pair
    counts = confusion_counts(pred, gt, num_labels, ignore_label)
    ta = tagging_accuracy(pred, gt, num_labels, ignore_label, threshold)
    biou, _ = localization_accuracy(pred, gt, num_labels, ignore_label)
    ba, _ = boundary_accuracy(pred, gt, num_labels, tolerance, ignore_label, box_scores=biou)

    return counts, ta, biou, ba


def evaluate_pairs(
    pairs: Iterable[LabelPair],
    num_labels: int,
    tolerance: int = DEFAULT_TOLERANCE,
    ignore_label: int = None,
    threads: int = 1,
    threshold: float = TAG_THRESHOLD,
    verbose: bool = False,
) -> EvalReport:
    """
    Evaluate predictions against ground truth over a corpus.

    Parameters
    ----------
    pairs : Iterable of (np.ndarray, np.ndarray)
        Predicted and ground truth H×W label maps.

    num_labels : int
        The number of labels l.

    tolerance : int (default=2)
        Boundary tolerance τ in pixels.

    ignore_label : int, optional
        Ground truth label left out of every metric.

    threads : int (default=1)
        Worker threads over images.

    threshold : float (default=0.001)
        Minimum pixel share of an image tag.

    verbose : bool (default=False)
        Show a progress bar.

    Returns
    -------
    EvalReport
        IoU from pooled pixel counts; TA, LA and BA averaged per image and then per class.
    """
    pairs = list(pairs)
    with tqdm(total=len(pairs), desc="Evaluating", unit="image", disable=not verbose) as progress:

        def run(pair: LabelPair):
            result = _evaluate_image(pair, num_labels, tolerance, ignore_label, threshold)
            progress.update(1)
            return result

        results = parallel_map(run, pairs, threads)

    counts = ConfusionCounts(*(np.zeros(num_labels, dtype=np.int64) for _ in range(3)))
    for image_counts, _, _, _ in results:
        counts = counts + image_counts

    iou, miou = iou_from_counts(counts)

    if results:
        ta = float(np.mean([ta for _, ta, _, _ in results]))
        biou = _nanmean(np.stack([biou for _, _, biou, _ in results]), axis=0)
        ba_per_class = _nanmean(np.stack([ba for _, _, _, ba in results]), axis=0)

    else:
        ta = float("nan")
        biou = np.full(num_labels, np.nan)
        ba_per_class = np.full(num_labels, np.nan)

    report = EvalReport(
        iou=iou,
        miou=miou,
        ta=ta,
        biou=biou,
        la=float(_nanmean(biou)),
        ba_per_class=ba_per_class,
        ba=float(_nanmean(ba_per_class)),
        counts=counts,
        images=len(results),
    )
    logger.info("Evaluated %s", report.summary())

    return report


def write_report_csv(report: EvalReport, path) -> Path:
    """
    Write a report as "class,iou,ba,biou" rows, a mean row and a summary line.

    Parameters
    ----------
    report : EvalReport
        The report.

    path : str or Path
        The destination CSV file.

    Returns
    -------
    Path
        The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(["class", "iou", "ba", "biou"])
        for label in range(report.num_labels):
            writer.writerow(
                [
                    label,
                    repr(float(report.iou[label])),
                    repr(float(report.ba_per_class[label])),
                    repr(float(report.biou[label])),
                ]
            )

        writer.writerow(["mean", repr(report.miou), repr(report.ba), repr(report.la)])
        file.write(f"# {report.summary()}\n")

    return path
