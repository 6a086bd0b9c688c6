"""Command line front end: dark-zeno {run,sweep,spectrum,design} <config>."""
import argparse
import logging
import sys

from dark_zeno.config import PROFILES, get_profile
from dark_zeno.errors import EXIT_OK, DarkZenoError, exit_code_for
from dark_zeno.runner import design, run_scenario, run_sweep, spectrum

logger = logging.getLogger(__name__)

COMMANDS = {
    "run": run_scenario,
    "sweep": run_sweep,
    "spectrum": spectrum,
    "design": design,
}

HELP = {
    "run": "execute the scenario's run mode and write trajectory.csv and summary.json",
    "sweep": "run the sweep block concurrently and fit a log-log slope",
    "spectrum": "report the Zeno spectrum, period and cyclic return",
    "design": "design the monitored state for a prescribed trajectory and verify it",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dark-zeno",
        description="Dark evolution under continuously monitored negative-result measurements",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name, help=HELP[name])
        sub.add_argument("config", help="scenario JSON file")
        sub.add_argument("--out", default=None, help="output directory (overrides output.directory)")
        sub.add_argument(
            "--tolerance-profile",
            default="default",
            choices=sorted(PROFILES),
            help="tolerance set used by every validation",
        )
        sub.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, force=True)
    try:
        report = COMMANDS[args.command](args.config, out=args.out, tol=get_profile(args.tolerance_profile))
    except DarkZenoError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        return exit_code_for(e)

    for path in report.files:
        print(path)
    return EXIT_OK
