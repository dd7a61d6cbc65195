# SPDX-License-Identifier: GPL-3.0-or-later
"""
Functions to train parameters on a corpus and to generate synthetic corpora.
"""

import logging
from pathlib import Path

from rich import print as rprint

from triple_mrf.cli.cli_utils import RunConfig, resolve_params
from triple_mrf.learning.corpus import load_corpus, save_corpus
from triple_mrf.learning.params import save_params
from triple_mrf.learning.synthetic import SceneSpec, gen_synthetic, read_scene_spec
from triple_mrf.learning.train import TrainConfig, train_incremental, write_loss_trace_csv
from triple_mrf.utils import DEFAULT_CORPUS_DIR, DEFAULT_PARAMS_DIR

logger = logging.getLogger(__name__)

DEFAULT_TRAIN_ITERATIONS = 50
LOSS_TRACE_FILE = "loss_trace.csv"


def train_wrapper(config: RunConfig, corpus_dir: Path) -> Path:
    """
    Train the smoothness head on a corpus stage by stage.

    Parameters
    ----------
    config : RunConfig
        Starting parameters or hyperparameters, the stages and their settings.

    corpus_dir : Path
        A corpus with unary, features and labels directories.

    Returns
    -------
    Path
        The directory holding the trained parameters and the loss trace.
    """
    corpus = load_corpus(
        corpus_dir, config.num_labels, config.ignore_label, verbose=config.verbose
    )
    params = resolve_params(config, corpus[0].unary.num_labels, kind=config.init)
    logger.info("Training %r on %d images", params, len(corpus))

    stage_configs = [
        TrainConfig(
            stage=stage,
            learning_rate=config.learning_rate,
            iterations=config.iterations or DEFAULT_TRAIN_ITERATIONS,
            batch_size=config.batch_size,
            seed=config.seed + index,
        )
        for index, stage in enumerate(config.stage_sequence)
    ]
    result = train_incremental(
        corpus,
        stage_configs,
        params,
        ignore_label=config.ignore_label,
        threads=config.threads,
        verbose=config.verbose,
    )

    output = Path(config.output or DEFAULT_PARAMS_DIR)
    save_params(result.params, output)
    write_loss_trace_csv(result.trace, output / LOSS_TRACE_FILE)

    for summary in result.stages:
        note = " [yellow](reverted)[/yellow]" if summary.reverted else ""
        rprint(
            f"[bold]{summary.stage}[/bold]: loss {summary.entry_loss:.6f} -> "
            f"{summary.exit_loss:.6f}{note}"
        )

    rprint(f"[green]Trained parameters written to {output}[/green]")

    return output


def gen_wrapper(config: RunConfig, spec_path: Path = None) -> Path:
    """
    Generate a synthetic corpus with planted label contexts.

    Parameters
    ----------
    config : RunConfig
        The seed and the output directory.

    spec_path : Path, optional
        A key=value scene grammar; the SceneSpec defaults when missing.

    Returns
    -------
    Path
        The corpus root.
    """
    spec = SceneSpec() if spec_path is None else read_scene_spec(spec_path)
    instances = gen_synthetic(spec, seed=config.seed, verbose=config.verbose)

    output = Path(config.output or DEFAULT_CORPUS_DIR)
    save_corpus(instances, output, verbose=config.verbose)

    rprint(f"[green]{len(instances)} synthetic scenes written to {output}[/green]")

    return output
