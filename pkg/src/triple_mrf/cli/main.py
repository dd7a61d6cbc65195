# SPDX-License-Identifier: GPL-3.0-or-later
"""
Setup and commands for the triple-mrf command line interface.
"""

#!/usr/bin/env python3
import argparse
import logging
from pathlib import Path

from rich import print as rprint
from rich.logging import RichHandler

from triple_mrf.cli.cli_utils import (
    EXIT_FAILURE,
    EXIT_SUCCESS,
    EXIT_USAGE,
    build_run_config,
    check_non_negative_int,
    check_odd_int,
    check_positive_int,
)
from triple_mrf.cli.cost import cost_wrapper
from triple_mrf.cli.evaluate import eval_wrapper
from triple_mrf.cli.refine import oracle_wrapper, refine_wrapper
from triple_mrf.cli.train import gen_wrapper, train_wrapper
from triple_mrf.cli.version import get_version_message
from triple_mrf.errors import DptFormatError, InvalidParameterError
from triple_mrf.inference.meanfield import PARALLEL, UPDATE_ORDERS
from triple_mrf.inference.pairwise import CURRENT_Q, FIXED_UNARY
from triple_mrf.learning.params import INIT_KINDS
from triple_mrf.metrics.boundary import DEFAULT_TOLERANCE
from triple_mrf.utils import DEFAULT_CORPUS_DIR, DEFAULT_OUTPUT_DIR, DEFAULT_PARAMS_DIR

REFINE_DESCRIPTION = "Refine a unary field with one feed-forward pass of the smoothness layers."
ORACLE_DESCRIPTION = "Refine a unary field with mean field passes under the triple penalty."
TRAIN_DESCRIPTION = "Train distance weights, activation and label contexts on a corpus."
EVAL_DESCRIPTION = "Evaluate predicted label maps with mIoU, TA, LA and BA."
COST_DESCRIPTION = "Count the operations of each smoothness layer."
GEN_DESCRIPTION = "Generate a synthetic corpus with planted label contexts."
CLI_EPILOG = "Pass --config FILE to read key=value settings; flags override the file."


def _add_subparser(subparsers, name: str, alias: str, description: str) -> argparse.ArgumentParser:
    subparser = subparsers.add_parser(
        name,
        aliases=[alias],
        help=description,
        description=description,
        epilog=CLI_EPILOG,
        formatter_class=lambda prog: argparse.HelpFormatter(prog, max_help_position=60),
    )
    subparser._actions[0].help = "Show this help message and exit."

    subparser.add_argument("--config", type=Path, help="A key=value file of settings.")
    subparser.add_argument(
        "--threads",
        type=check_positive_int,
        help="Worker threads over images, or over row bands in refine (default: 1).",
    )
    subparser.add_argument(
        "--verbose",
        action=argparse.BooleanOptionalAction,
        help="Log debug messages and show progress bars.",
    )

    return subparser


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--params", type=Path, help="A parameter directory written by the train command."
    )
    parser.add_argument("--labels", dest="num_labels", type=int, help="The number of labels l.")
    parser.add_argument(
        "--components",
        dest="num_components",
        type=check_positive_int,
        help="Context mixture size K without --params (default: 1).",
    )
    parser.add_argument(
        "--window",
        type=check_odd_int,
        help="Triple window m without --params (default: 3).",
    )
    parser.add_argument(
        "--context-size",
        type=check_odd_int,
        help="Context window n without --params (default: 3).",
    )
    parser.add_argument("--omega1", type=float, help="Intensity distance weight (default: 0).")
    parser.add_argument("--omega2", type=float, help="Spatial distance weight (default: 1).")
    parser.add_argument("--a", type=float, help="Slope of the linear activation (default: 1).")
    parser.add_argument("--b", type=float, help="Offset of the linear activation (default: 0).")


def _add_instance_arguments(parser: argparse.ArgumentParser, default_file: str) -> None:
    parser.add_argument("--unary", type=Path, help="The H×W×l unary tensor.")
    parser.add_argument(
        "--features", type=Path, help="The H×W×C intensity tensor (default: zeros)."
    )
    parser.add_argument(
        "--output",
        type=Path,
        help=f"The output tensor (default: ./{DEFAULT_OUTPUT_DIR}/{default_file}).",
    )
    _add_model_arguments(parser)


def build_parser() -> argparse.ArgumentParser:
    # MARK: CLI Base

    parser = argparse.ArgumentParser(
        prog="triple-mrf",
        description="The triple-mrf CLI refines segmentation unaries with triple penalty label contexts.",
        epilog=CLI_EPILOG,
        formatter_class=lambda prog: argparse.HelpFormatter(prog, max_help_position=60),
    )
    subparsers = parser.add_subparsers(dest="command")

    parser.add_argument(
        "--version",
        action="version",
        version=get_version_message(),
        help="Show the version of the triple-mrf CLI.",
    )

    # MARK: Refine

    refine_parser = _add_subparser(subparsers, "refine", "r", REFINE_DESCRIPTION)
    _add_instance_arguments(refine_parser, "refined.dpt")
    refine_parser.add_argument(
        "--lut",
        action=argparse.BooleanOptionalAction,
        help="Build the locally convolutional kernels through lookup tables.",
    )
    refine_parser.add_argument(
        "--dump-activations",
        type=Path,
        help="Write every layer output to this directory.",
    )
    refine_parser.add_argument(
        "--argmax", type=Path, help="Also write the argmax labels to this file."
    )
    refine_parser.add_argument(
        "--output-size",
        nargs=2,
        type=check_positive_int,
        metavar=("H", "W"),
        help="Bilinearly resize the output marginals.",
    )

    # MARK: Oracle

    oracle_parser = _add_subparser(subparsers, "oracle", "o", ORACLE_DESCRIPTION)
    _add_instance_arguments(oracle_parser, "oracle.dpt")
    oracle_parser.add_argument(
        "--iterations", type=check_positive_int, help="Mean field passes (default: 1)."
    )
    oracle_parser.add_argument(
        "--schedule",
        choices=UPDATE_ORDERS,
        default=PARALLEL,
        help=f"Update order of the passes (default: {PARALLEL}).",
    )
    oracle_parser.add_argument(
        "--damping", type=float, default=1.0, help="Weight of each new candidate (default: 1)."
    )
    oracle_parser.add_argument(
        "--kernel-source",
        choices=(FIXED_UNARY, CURRENT_Q),
        default=FIXED_UNARY,
        help=f"Weights of the inner distance sums (default: {FIXED_UNARY}).",
    )
    oracle_parser.add_argument(
        "--trace", type=Path, help="Free energy CSV (default: next to the output)."
    )

    # MARK: Train

    train_parser = _add_subparser(subparsers, "train", "t", TRAIN_DESCRIPTION)
    train_parser.add_argument(
        "--corpus",
        type=Path,
        default=Path(DEFAULT_CORPUS_DIR),
        help=f"The corpus directory (default: ./{DEFAULT_CORPUS_DIR}).",
    )
    train_parser.add_argument(
        "--output",
        type=Path,
        help=f"The parameter directory to write (default: ./{DEFAULT_PARAMS_DIR}).",
    )
    _add_model_arguments(train_parser)
    train_parser.add_argument(
        "--stages", type=str, help="Comma separated stages (default: all four in order)."
    )
    train_parser.add_argument("--learning-rate", type=float, help="Step size (default: 0.1).")
    train_parser.add_argument(
        "--iterations", type=check_positive_int, help="Steps per stage (default: 50)."
    )
    train_parser.add_argument(
        "--batch-size", type=check_positive_int, help="Images per step (default: 8)."
    )
    train_parser.add_argument("--seed", type=int, help="Seed of the batch draws (default: 0).")
    train_parser.add_argument(
        "--init", choices=INIT_KINDS, help="Initial context costs without --params (default: zero)."
    )
    train_parser.add_argument(
        "--init-scale", type=float, help="Magnitude of potts or random costs (default: 1)."
    )
    train_parser.add_argument(
        "--ignore-label", type=int, help="Ground truth label left out of the loss."
    )

    # MARK: Eval

    eval_parser = _add_subparser(subparsers, "eval", "e", EVAL_DESCRIPTION)
    eval_parser.add_argument(
        "--pred", type=Path, required=True, help="Directory of predicted label maps."
    )
    eval_parser.add_argument(
        "--gt", type=Path, required=True, help="Directory of ground truth label maps."
    )
    eval_parser.add_argument(
        "--tau",
        type=check_non_negative_int,
        default=DEFAULT_TOLERANCE,
        help=f"Boundary tolerance in pixels (default: {DEFAULT_TOLERANCE}).",
    )
    eval_parser.add_argument(
        "--labels", dest="num_labels", type=int, help="The number of labels l (default: inferred)."
    )
    eval_parser.add_argument(
        "--ignore-label", type=int, help="Ground truth label left out of every metric."
    )
    eval_parser.add_argument(
        "--output",
        type=Path,
        help=f"The report CSV (default: ./{DEFAULT_OUTPUT_DIR}/eval.csv).",
    )

    # MARK: Cost

    cost_parser = _add_subparser(subparsers, "cost", "c", COST_DESCRIPTION)
    cost_parser.add_argument(
        "--f", type=check_positive_int, default=21, help="Label channels f (default: 21)."
    )
    cost_parser.add_argument(
        "--fprime",
        type=check_positive_int,
        default=5,
        help="Context components per label f' (default: 5).",
    )
    cost_parser.add_argument(
        "--N",
        dest="image_size",
        type=check_positive_int,
        default=512,
        help="Image side length N (default: 512).",
    )
    cost_parser.add_argument(
        "--s", type=check_positive_int, default=50, help="Kernel side length s (default: 50)."
    )
    cost_parser.add_argument(
        "--M", dest="batch", type=check_positive_int, default=10, help="Batch size M (default: 10)."
    )
    cost_parser.add_argument(
        "--ops-per-second", type=float, help="Throughput for a runtime estimate."
    )

    # MARK: Gen

    gen_parser = _add_subparser(subparsers, "gen", "g", GEN_DESCRIPTION)
    gen_parser.add_argument("--spec", type=Path, help="A key=value scene grammar file.")
    gen_parser.add_argument("--seed", type=int, help="Seed of the scenes (default: 0).")
    gen_parser.add_argument(
        "--output",
        type=Path,
        help=f"The corpus directory (default: ./{DEFAULT_CORPUS_DIR}).",
    )

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_SUCCESS

    # MARK: Setup CLI

    try:
        config = build_run_config(args)

    except (InvalidParameterError, OSError) as error:
        rprint(f"[bold red]Invalid configuration: {error}[/bold red]")
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if config.verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(markup=True)],
    )

    try:
        if args.command in ["refine", "r"]:
            refine_wrapper(
                config,
                activations_dir=args.dump_activations,
                argmax_path=args.argmax,
                output_size=tuple(args.output_size) if args.output_size else None,
            )

        elif args.command in ["oracle", "o"]:
            oracle_wrapper(
                config,
                order=args.schedule,
                damping=args.damping,
                kernel_source=args.kernel_source,
                trace_path=args.trace,
            )

        elif args.command in ["train", "t"]:
            train_wrapper(config, corpus_dir=args.corpus)

        elif args.command in ["eval", "e"]:
            eval_wrapper(config, pred_dir=args.pred, gt_dir=args.gt, tolerance=args.tau)

        elif args.command in ["cost", "c"]:
            cost_wrapper(
                f=args.f,
                f_prime=args.fprime,
                n=args.image_size,
                s=args.s,
                m=args.batch,
                ops_per_second=args.ops_per_second,
            )

        elif args.command in ["gen", "g"]:
            gen_wrapper(config, spec_path=args.spec)

    except (DptFormatError, InvalidParameterError, OSError) as error:
        rprint(f"[bold red]{error}[/bold red]")
        return EXIT_USAGE

    except (ValueError, ArithmeticError, RuntimeError) as error:
        rprint(f"[bold red]{type(error).__name__}: {error}[/bold red]")
        return EXIT_FAILURE

    except KeyboardInterrupt:
        rprint("[bold red]Execution was interrupted by the user.[/bold red]")
        return EXIT_FAILURE

    return EXIT_SUCCESS


if __name__ == "__main__":
    raise SystemExit(main())
