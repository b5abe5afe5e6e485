#!/usr/bin/env python
"""
.. _reeb_rigidity:

``reeb_rigidity``
-----------------

::

    usage: reeb_rigidity [-h] {spectrum,constellation,certify,profile,plug,run,fields} ...

    Closed Reeb orbit spectra, rigid constellations and persistence
    certificates for conformally rescaled contact forms.

    Every command reads a scenario. ``run`` takes scenario files or
    directories of ``*.scenario`` files; the other commands build the scenario
    from ``section.key=value`` arguments, e.g.

        reeb_rigidity certify model.kind=Sphere model.n=2 \\
            factor.preset=ellipsoid factor.weights=1,1.2 theorem.id=sphere

    Reports are JSON, one per scenario. The exit status is 0 when every
    certificate is valid and no cross validation failed, 1 otherwise and 2
    for scenario errors.

    positional arguments:
      {spectrum,constellation,certify,profile,plug,run,fields}

    options:
      -h, --help            show this help message and exit

    common options of every command:
      --tol TOL             orbit tolerance
      --grid N              plug and factor grid size
      --cap CAP             spectrum cap
      --out DIR             directory the reports are written to
      --filled              use the bounds for exactly fillable forms
      --seed-grid N         orbit scan seed grid
      -v, --verbose         log progress (twice for debug output)
"""

import logging
import sys
import textwrap
from argparse import ArgumentParser, RawDescriptionHelpFormatter
from concurrent.futures import ThreadPoolExecutor

from reebrigidity import config
from reebrigidity.exceptions import ScenarioError
from reebrigidity.scenario import (
    COMMANDS,
    EXIT_PARSE,
    SECTIONS,
    load_scenario,
    report_path,
    run,
    scenario_from_settings,
)
from reebrigidity.scripts.utils import collect_scenario_files, describe_sections


def _common_parser():
    common = ArgumentParser(add_help=False)
    group = common.add_argument_group("common options of every command")
    group.add_argument("--tol", type=float, help="orbit tolerance")
    group.add_argument("--grid", metavar="N", type=int, help="plug and factor grid size")
    group.add_argument("--cap", type=float, help="spectrum cap")
    group.add_argument("--out", metavar="DIR", type=str, help="directory the reports are written to")
    group.add_argument("--filled", action="store_true", help="use the bounds for exactly fillable forms")
    group.add_argument("--seed-grid", metavar="N", dest="seed_grid", type=int, help="orbit scan seed grid")
    group.add_argument("-v", "--verbose", action="count", default=0, help="log progress (twice for debug output)")
    return common


def build_parser():
    parser = ArgumentParser(
        prog="reeb_rigidity",
        formatter_class=RawDescriptionHelpFormatter,
        description=textwrap.dedent(
            """
            Closed Reeb orbit spectra, rigid constellations and persistence
            certificates for conformally rescaled contact forms.

            Every command reads a scenario. ``run`` takes scenario files or
            directories of ``*.scenario`` files; the other commands build the
            scenario from ``section.key=value`` arguments.
            """
        ),
    )
    common = _common_parser()
    commands = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = commands.add_parser(command, parents=[common], help=f"run a {command} scenario given inline")
        sub.add_argument("settings", metavar="section.key=value", nargs="*", help="scenario settings")
    batch = commands.add_parser("run", parents=[common], help="run scenario files or directories")
    batch.add_argument("paths", metavar="<scenario file or directory>", nargs="+")
    commands.add_parser("fields", help="list every scenario field")
    return parser


def configure(args):
    """
    Apply the command line overrides to :mod:`reebrigidity.config` before any
    scenario runs.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.tol is not None:
        config.ORBIT_TOL = args.tol
    if args.grid is not None:
        config.PLUG_GRID = args.grid
        config.FACTOR_GRID = args.grid
    if args.cap is not None:
        config.SPECTRUM_CAP = args.cap
    if args.seed_grid is not None:
        config.SEED_GRID = args.seed_grid


def _emit(scenario, result, out):
    path = report_path(scenario, out)
    if path is None:
        print(result.model_dump_json(indent=2))
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    result.write(path)
    print(f"{result.name}: status {result.status}, report written to {path}")


def _run_file(path, filled, out):
    try:
        scenario = load_scenario(path)
    except ScenarioError as e:
        print(f"{path}: {e}", file=sys.stderr)
        return EXIT_PARSE
    result = run(scenario, filled=filled)
    if result.error:
        print(f"{path}: {result.error}", file=sys.stderr)
    _emit(scenario, result, out)
    return result.status


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "fields":
        print("\n".join(describe_sections(SECTIONS)))
        return 0

    configure(args)

    if args.command == "run":
        try:
            files = collect_scenario_files(args.paths)
        except FileNotFoundError as e:
            print(e, file=sys.stderr)
            return EXIT_PARSE
        if not files:
            print("No scenario files found", file=sys.stderr)
            return EXIT_PARSE
        with ThreadPoolExecutor(max_workers=max(config.SCAN_WORKERS, 1)) as pool:
            statuses = list(pool.map(lambda p: _run_file(p, args.filled, args.out), files))
        return max(statuses)

    try:
        scenario = scenario_from_settings(args.command, args.settings)
    except ScenarioError as e:
        print(e, file=sys.stderr)
        return EXIT_PARSE
    result = run(scenario, filled=args.filled)
    if result.error:
        print(result.error, file=sys.stderr)
    _emit(scenario, result, args.out)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
