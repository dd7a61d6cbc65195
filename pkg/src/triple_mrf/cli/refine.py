# SPDX-License-Identifier: GPL-3.0-or-later
"""
Functions to refine a unary field with the layer stack or with the mean field reference.
"""

import logging
from pathlib import Path
from typing import Tuple

from rich import print as rprint

from triple_mrf.cli.cli_utils import RunConfig, load_inputs, resolve_params
from triple_mrf.inference.meanfield import MfSchedule, mf_init, run_mf, write_trace_csv
from triple_mrf.inference.pairwise import FIXED_UNARY, TriplePenaltyModel
from triple_mrf.layers.dpn import dpn_forward, dump_activations
from triple_mrf.tensors.dpt import write_label_map, write_tensor
from triple_mrf.tensors.resize import bilinear_resize
from triple_mrf.utils import DEFAULT_OUTPUT_DIR

logger = logging.getLogger(__name__)

REFINED_FILE = "refined.dpt"
ORACLE_FILE = "oracle.dpt"
FREE_ENERGY_FILE = "free_energy.csv"


def refine_wrapper(
    config: RunConfig,
    activations_dir: Path = None,
    argmax_path: Path = None,
    output_size: Tuple[int, int] = None,
) -> Path:
    """
    Refine a unary field with one feed-forward pass of the smoothness head.

    Parameters
    ----------
    config : RunConfig
        Inputs, parameters and the output tensor path.

    activations_dir : Path, optional
        Also write every layer output to this directory.

    argmax_path : Path, optional
        Also write the argmax labels of the output as a label map.

    output_size : tuple of (int, int), optional
        Bilinearly resize the output marginals to this height and width.

    Returns
    -------
    Path
        The written marginals.
    """
    unary, feats = load_inputs(config)
    params = resolve_params(config, unary.num_labels)

    acts = dpn_forward(
        unary,
        feats,
        params.dp,
        params.ctx,
        params.tw,
        params.a,
        params.b,
        lut=config.lut,
        threads=config.threads,
    )
    logger.debug("Layer outputs: %r", acts)

    refined = acts.o15
    if output_size is not None:
        refined = bilinear_resize(refined, *output_size)

    output = config.output or Path(DEFAULT_OUTPUT_DIR) / REFINED_FILE
    write_tensor(refined, output)

    if activations_dir is not None:
        paths = dump_activations(acts, activations_dir)
        logger.info("Wrote %d layer outputs to %s", len(paths), activations_dir)

    if argmax_path is not None:
        write_label_map(refined.argmax(axis=-1), argmax_path)
        logger.info("Wrote labels to %s", argmax_path)

    rprint(f"[green]Refined marginals {list(refined.shape)} written to {output}[/green]")

    return output


def oracle_wrapper(
    config: RunConfig,
    order: str,
    damping: float = 1.0,
    kernel_source: str = FIXED_UNARY,
    trace_path: Path = None,
) -> Path:
    """
    Refine a unary field with mean field passes under the triple penalty.

    The reference runs on a single thread whatever config.threads holds.

    Parameters
    ----------
    config : RunConfig
        Inputs, parameters, the number of passes and the output tensor path.

    order : str
        "parallel" or "sequential-raster".

    damping : float (default=1.0)
        Weight of each new candidate.

    kernel_source : str (default=fixed-unary)
        Weights of the inner sums.

    trace_path : Path, optional
        Free energy CSV; next to the output tensor when missing.

    Returns
    -------
    Path
        The written marginals.
    """
    unary, feats = load_inputs(config)
    params = resolve_params(config, unary.num_labels)
    if params.a != 1.0 or params.b != 0.0:
        logger.warning(
            "The mean field reference has no linear activation; ignoring a=%g and b=%g.",
            params.a,
            params.b,
        )

    schedule = MfSchedule(config.iterations or 1, order, damping)
    model = TriplePenaltyModel(unary, params.ctx, params.tw, feats, params.dp, kernel_source)
    q, trace = run_mf(mf_init(unary), unary, model, schedule)

    output = config.output or Path(DEFAULT_OUTPUT_DIR) / ORACLE_FILE
    write_tensor(q, output)

    trace_path = trace_path or Path(output).with_name(FREE_ENERGY_FILE)
    write_trace_csv(trace, trace_path)

    rprint(
        f"[green]{schedule.iterations} {schedule.order} pass(es) written to {output}; "
        f"final free energy {trace[-1]:.6f}[/green]"
    )

    return output
