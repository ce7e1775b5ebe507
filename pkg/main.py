"""Command-line entry point"""
import argparse
import asyncio
import importlib
import sys
from typing import List, Optional

import config
from config import EXIT_FAILURE
from picard import NonConvergenceError
from shooting import SingularityError, BracketError, MonotonicityError
from stefan import InfeasibleParametersError, StefanConvergenceError
from utils import memory_mb
from commands import common_options

COMMANDS_TO_LOAD = [
    "commands.phi",
    "commands.region",
    "commands.verify",
    "commands.compare",
    "commands.stefan",
]


class CliArgumentError(ValueError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1 like every other failure"""

    def error(self, message):
        raise CliArgumentError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="phi", description="Modified error function toolkit")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    loaded = 0
    for name in COMMANDS_TO_LOAD:
        try:
            importlib.import_module(name).setup(subparsers, common_options())
            loaded += 1
        except Exception as e:
            print(f"❌ Failed to load {name}: {e}", file=sys.stderr)

    if loaded < len(COMMANDS_TO_LOAD):
        print(f"⚠️ Loaded {loaded}/{len(COMMANDS_TO_LOAD)} commands", file=sys.stderr)
    return parser


def handle_command_error(error: Exception) -> int:
    """Global error handler: one diagnostic line on stderr, exit 1"""
    if isinstance(error, CliArgumentError):
        message = f"usage error: {error}"
    elif isinstance(error, NonConvergenceError):
        message = f"picard did not converge: {error} (after {error.iterations} iterations)"
    elif isinstance(error, SingularityError):
        message = f"shooting hit the singular level 1 + delta*y = 0 near x = {error.x:.6g}: {error}"
    elif isinstance(error, BracketError):
        message = f"shooting could not bracket the initial slope: {error}"
    elif isinstance(error, MonotonicityError):
        message = f"shooting terminal map lost monotonicity: {error}"
    elif isinstance(error, StefanConvergenceError):
        message = (f"{error} (last delta={error.delta:.12g}, gamma={error.gamma:.12g}, "
                   f"residuals {error.residuals[0]:.3e}, {error.residuals[1]:.3e})")
    elif isinstance(error, InfeasibleParametersError):
        message = f"infeasible parameters: {error}"
    elif isinstance(error, (ValueError, ArithmeticError, OSError)):
        message = str(error)
    else:
        message = f"unexpected error: {type(error).__name__}: {error}"

    print(f"❌ Error: {message}", file=sys.stderr)
    return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CliArgumentError as e:
        return handle_command_error(e)

    verbose = config.VERBOSE
    config.VERBOSE = verbose or args.verbose
    if config.VERBOSE:
        print(f"[MEMORY] Initial: {memory_mb():.1f} MB")

    try:
        code = asyncio.run(args.handler(args))
    except Exception as e:
        code = handle_command_error(e)
    finally:
        if config.VERBOSE:
            print(f"[MEMORY] Final: {memory_mb():.1f} MB")
        config.VERBOSE = verbose
    return code


if __name__ == "__main__":
    sys.exit(main())
