"""lamtransfer CLI - command-line interface"""

import argparse
import logging
import sys
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler

from .congruence import LevelChoice
from .pipeline import COMMANDS, EXIT_INPUT, INPUT_ERRORS, RunConfig, run_command
from .report import render

err_console = Console(stderr=True)


def setup_logging(debug: bool = False) -> None:
    handler = RichHandler(console=err_console, show_time=False, show_path=debug, markup=False)
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(message)s",
        handlers=[handler],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime p")
    common.add_argument("--D", type=int, help="K = Q(sqrt -D), D squarefree")
    common.add_argument("--offline", action="store_true", help="never touch the network (cache and fixtures only)")
    common.add_argument("--cache-dir", help="record cache directory (default $LAMTRANSFER_CACHE_DIR)")
    common.add_argument("--emit", choices=("text", "json"), default="text", help="report format")
    common.add_argument(
        "--level",
        choices=[c.value for c in LevelChoice],
        default=LevelChoice.LCM.value,
        help="level fed to the Sturm bound",
    )
    common.add_argument("--audit-brink", action="store_true", help="compute s_ell even where d_ell = 0")
    common.add_argument(
        "--strict-congruence", action="store_true", help="treat skipped additive primes as inconclusive"
    )
    common.add_argument("-d", "--debug", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="lamtransfer",
        description="Anticyclotomic lambda-invariant transfer between congruent modular forms",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Inputs are record files (.json), bundled fixtures (19a1, 817b1) or database labels.

Examples:
    lamtransfer inspect 19a1 --p 5 --D 51       Conductor, reduction table, a_p, torsion
    lamtransfer congruent 19a1 817b1 --p 5      Coefficient comparison up to the Sturm bound
    lamtransfer euler 19a1 --p 5 --ell 43       Euler factor mod p and d_ell
    lamtransfer brink --D 51 --p 5 --ell 43     Decomposition count s_ell
    lamtransfer verify 19a1 --p 5 --D 51        Hypothesis dossier for one form
    lamtransfer transfer 19a1 817b1 --p 5 --D 51 --emit json

Exit codes: 0 success, 1 hypothesis failure, 2 input error, 3 inconclusive.
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    inspect_parser = subparsers.add_parser("inspect", parents=[common], help="Describe one curve or eigenform")
    inspect_parser.add_argument("input")

    congruent_parser = subparsers.add_parser("congruent", parents=[common], help="Check f1 = f2 mod p")
    congruent_parser.add_argument("f1")
    congruent_parser.add_argument("f2")

    euler_parser = subparsers.add_parser("euler", parents=[common], help="Euler factors and d_ell")
    euler_parser.add_argument("input")
    euler_parser.add_argument("--ell", type=int, help="single prime (default: every bad prime)")

    brink_parser = subparsers.add_parser("brink", parents=[common], help="s_ell in the anticyclotomic tower")
    brink_parser.add_argument("--ell", type=int, required=True, help="prime split in K")

    verify_parser = subparsers.add_parser("verify", parents=[common], help="Hypothesis dossier for one form")
    verify_parser.add_argument("input")

    transfer_parser = subparsers.add_parser("transfer", parents=[common], help="Transfer lambda from f1 to f2")
    transfer_parser.add_argument("f1")
    transfer_parser.add_argument("f2")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.command in ("congruent", "transfer"):
        inputs = (args.f1, args.f2)
    elif args.command == "brink":
        inputs = ()
    else:
        inputs = (args.input,)
    return RunConfig(
        command=args.command,
        inputs=inputs,
        p=args.p,
        D=args.D,
        ell=getattr(args, "ell", None),
        offline=args.offline,
        cache_dir=args.cache_dir,
        strict_congruence=args.strict_congruence,
        level_choice=LevelChoice(args.level),
        emit=args.emit,
        audit_brink=args.audit_brink,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command not in COMMANDS:
        parser.print_help(sys.stderr)
        return EXIT_INPUT

    setup_logging(args.debug)
    config = config_from_args(args)
    try:
        dossier = run_command(config, progress=err_console)
    except INPUT_ERRORS as e:
        err_console.print(f"error: {e}", markup=False, highlight=False, soft_wrap=True)
        if args.debug:
            err_console.print_exception()
        return EXIT_INPUT

    sys.stdout.write(render(dossier, config.emit))
    sys.stdout.flush()
    return dossier["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
