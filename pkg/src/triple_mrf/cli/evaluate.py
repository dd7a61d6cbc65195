# SPDX-License-Identifier: GPL-3.0-or-later
"""
Functions to evaluate a directory of predicted label maps against ground truth.
"""

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np
from rich import print as rprint
from tqdm.auto import tqdm

from triple_mrf.cli.cli_utils import RunConfig
from triple_mrf.metrics.boundary import DEFAULT_TOLERANCE
from triple_mrf.metrics.report import EvalReport, evaluate_pairs, write_report_csv
from triple_mrf.tensors.dpt import read_label_map
from triple_mrf.utils import DEFAULT_OUTPUT_DIR

logger = logging.getLogger(__name__)

EVAL_FILE = "eval.csv"


def read_label_pairs(
    pred_dir: Path, gt_dir: Path, verbose: bool = False
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Read predicted and ground truth label maps paired by file name.

    Parameters
    ----------
    pred_dir : Path
        Directory of predicted label maps.

    gt_dir : Path
        Directory of ground truth label maps with the same file names.

    verbose : bool (default=False)
        Show a progress bar.

    Returns
    -------
    list of (np.ndarray, np.ndarray)
        The pairs in file name order.
    """
    gt_paths = sorted(Path(gt_dir).glob("*.dpt"))
    if not gt_paths:
        raise FileNotFoundError(f"No label maps found in {gt_dir}.")

    pairs = []
    for gt_path in tqdm(gt_paths, desc="Reading label maps", unit="image", disable=not verbose):
        pred_path = Path(pred_dir) / gt_path.name
        if not pred_path.is_file():
            raise FileNotFoundError(f"No prediction {pred_path} for {gt_path}.")

        pairs.append((read_label_map(pred_path), read_label_map(gt_path)))

    return pairs


def infer_num_labels(pairs: List[Tuple[np.ndarray, np.ndarray]], ignore_label: int = None) -> int:
    """
    One more than the largest label of every map, ignored pixels excluded; at least 2.
    """
    largest = 0
    for pred, gt in pairs:
        valid = np.ones(gt.shape, dtype=bool) if ignore_label is None else gt != ignore_label
        if valid.any():
            largest = max(largest, int(pred[valid].max()), int(gt[valid].max()))

    return max(2, largest + 1)


def eval_wrapper(
    config: RunConfig, pred_dir: Path, gt_dir: Path, tolerance: int = DEFAULT_TOLERANCE
) -> EvalReport:
    """
    Evaluate predictions and write the report CSV.

    Parameters
    ----------
    config : RunConfig
        The number of labels, ignore label, threads and output CSV path.

    pred_dir : Path
        Directory of predicted label maps.

    gt_dir : Path
        Directory of ground truth label maps.

    tolerance : int (default=2)
        Boundary tolerance τ in pixels.

    Returns
    -------
    EvalReport
        The metrics.
    """
    pairs = read_label_pairs(pred_dir, gt_dir, verbose=config.verbose)
    num_labels = config.num_labels or infer_num_labels(pairs, config.ignore_label)
    logger.debug("Evaluating %d label maps with %d labels", len(pairs), num_labels)

    report = evaluate_pairs(
        pairs,
        num_labels,
        tolerance=tolerance,
        ignore_label=config.ignore_label,
        threads=config.threads,
        verbose=config.verbose,
    )

    output = config.output or Path(DEFAULT_OUTPUT_DIR) / EVAL_FILE
    write_report_csv(report, output)

    rprint(f"[bold]{report.summary()}[/bold]")
    rprint(f"[green]Report written to {output}[/green]")

    return report
