"""
Command-line entry point.

Commands: ingest, prompt, infer, eval, compare, selftest.
Exit codes: 0 success, 1 other failure, 2 validation/config error,
3 backend error, 4 insufficient data.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .exceptions import (
    BackendException,
    ConfigException,
    InsufficientDataException,
    ServiceException,
    ValidationException,
)
from .handlers import dataset_handler, run_handler, selftest_handler

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_BACKEND = 3
EXIT_INSUFFICIENT_DATA = 4


def exit_code_for(error: ServiceException) -> int:
    if isinstance(error, (ValidationException, ConfigException)):
        return EXIT_VALIDATION
    if isinstance(error, BackendException):
        return EXIT_BACKEND
    if isinstance(error, InsufficientDataException):
        return EXIT_INSUFFICIENT_DATA
    return EXIT_FAILURE


def _add_run_flags(parser: argparse.ArgumentParser, manifest_required: bool = True) -> None:
    parser.add_argument("--manifest", required=manifest_required, help="line-delimited JSON object manifest")
    parser.add_argument("--config", help="run configuration JSON file")
    parser.add_argument("--backend", choices=["toy", "scripted", "remote"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--grid", type=int, help="vision grid size G")
    parser.add_argument("--dim", type=int, help="shared embedding dimension")
    parser.add_argument("--stride-ms", dest="stride_ms", type=int, help="tactile frame stride")
    parser.add_argument("--mode", choices=["strict", "lenient"], help="response parse mode")
    parser.add_argument("--modalities", choices=["vision_tactile", "vision", "tactile"],
                        help="which sensor spans the model sees")
    parser.add_argument("--out", help="output directory for artifacts and reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vital", description="Vision + touch physical property inference")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="validate a manifest and sample tactile frames")
    _add_run_flags(ingest)
    ingest.set_defaults(handler=dataset_handler.ingest_command)

    prompt = commands.add_parser("prompt", help="print the rendered prompt")
    _add_run_flags(prompt, manifest_required=False)
    prompt.add_argument("--object", help="object id from the manifest")
    prompt.add_argument("--hint", help="optional object hint added to the prompt")
    prompt.set_defaults(handler=dataset_handler.prompt_command)

    infer = commands.add_parser("infer", help="run one object end to end")
    _add_run_flags(infer)
    infer.add_argument("--object", required=True, help="object id from the manifest")
    infer.set_defaults(handler=run_handler.infer_command)

    evaluate = commands.add_parser("eval", help="run the manifest and write the correlation report")
    _add_run_flags(evaluate)
    evaluate.add_argument("--rescore", action="store_true",
                          help="re-evaluate the saved scores of an earlier run without calling the backend")
    evaluate.set_defaults(handler=run_handler.eval_command)

    compare = commands.add_parser("compare", help="print finished runs side by side")
    compare.add_argument("--runs", nargs="+", required=True, help="run ids under the output directory")
    compare.add_argument("--out", help="output directory holding the runs")
    compare.set_defaults(handler=run_handler.compare_command)

    selftest = commands.add_parser("selftest", help="run the numerics oracle suite")
    selftest.set_defaults(handler=selftest_handler.selftest_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ServiceException as e:
        code = exit_code_for(e)
        logger.error(f"❌ {args.command} failed ({e.__class__.__name__}): {e}")
        print(f"❌ {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
