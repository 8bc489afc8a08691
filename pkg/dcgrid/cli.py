# coding=utf-8
"""
Command line entry point ``dcgrid``.

Exit codes: 0 on success, 1 when an analysis cannot be carried out, 2 for
malformed or invalid input.
"""
import argparse
import sys
from dataclasses import replace

from . import __version__
from .criteria import checklist, large_signal_verdict
from .errors import AnalysisError, InputError
from .log_utils import configure_cli_logging, get_default_logger
from .netmodel import load_scenario
from .presets import write_examples
from .reports import summary_text, to_json, write_sweep_outputs
from .rlcbench import table9_compare
from .sweep import assess_scenario, compare_controllers, parse_sweep, sweep
from .utils import format_number, text_table_from_dict

log = get_default_logger(__name__)

EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_INPUT = 2


def _read_sweep(path):
    with open(path) as file:
        return parse_sweep(file.read())


def _emit(text, path=None):
    if path:
        with open(path, "w") as file:
            file.write(text + "\n")
        log.info("Wrote %s", path)
    else:
        print(text)


def cmd_check(args):
    grid = load_scenario(args.scenario).grid
    if args.p_l:
        rows = checklist(grid, args.p_l)
        print(text_table_from_dict(rows, ["p_l", "large_signal", "small_signal", "equilibria", "v_upper", "c4_margin"]))
        return EXIT_OK
    report = large_signal_verdict(grid)
    _emit(report.to_json(), args.json)
    rows = [{"condition": c.id.value, "pass": c.passed, "margin": c.margin} for c in report.conditions]
    for index, results in enumerate(report.per_equilibrium):
        for c in results:
            label = "{} @ {:.6g} V".format(c.id.value, report.equilibria[index].v_l)
            rows.append({"condition": label, "pass": c.passed, "margin": c.margin})
    if rows:
        print(text_table_from_dict(rows, ["condition", "pass", "margin"]))
    if report.unsupported:
        print("large-signal: unsupported ({})".format(report.unsupported))
    else:
        print("large-signal stable: {}".format(format_number(report.large_signal)))
    print("small-signal stable: {}".format(format_number(report.small_signal)))
    return EXIT_OK


def cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    series, metrics, target = assess_scenario(scenario, band_frac=args.band_frac, hold_frac=args.hold_frac)
    if args.csv:
        with open(args.csv, "w", newline="") as file:
            series.to_csv(file)
        log.info("Wrote %s", args.csv)
    rows = [dict(metrics.as_dict(), final_v_l=float(series.v_l[-1]), samples=len(series))]
    print(text_table_from_dict(rows, ["verdict", "steady_value", "final_v_l", "overshoot", "settling_time", "samples"]))
    return EXIT_OK


def cmd_sweep(args):
    spec = _read_sweep(args.sweepspec)
    if args.workers:
        spec = replace(spec, workers=args.workers)
    region = sweep(spec)
    if args.csv:
        for path in write_sweep_outputs(region, args.csv, gnuplot=args.gnuplot):
            print(path)
    print(summary_text(region))
    return EXIT_OK


def cmd_rlc_bench(args):
    report = table9_compare(args.l, args.c, args.rl, n_samples=args.samples)
    print(report.to_text())
    if args.json:
        _emit(to_json(report), args.json)
    return EXIT_OK if not report.mismatches else EXIT_ANALYSIS


def cmd_compare_controllers(args):
    comparison = compare_controllers(load_scenario(args.scenario))
    rows = [comparison.proposed.as_dict(), comparison.droop.as_dict()]
    print(text_table_from_dict(rows, ["controller", "verdict", "startup_overshoot", "post_plug_overshoot", "final_v_l"]))
    for claim, holds in comparison.claims.items():
        print("{}: {}".format(claim, format_number(holds)))
    if args.json:
        _emit(to_json(comparison), args.json)
    return EXIT_OK


def cmd_gen_examples(args):
    for path in write_examples(args.dir):
        print(path)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="dcgrid", description="Stability analysis of DC microgrids with CPLs")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="log errors only")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    check = commands.add_parser("check", help="large- and small-signal verdicts for a scenario")
    check.add_argument("scenario")
    check.add_argument("--p-l", type=float, nargs="+", help="evaluate a checklist of CPL powers instead")
    check.add_argument("--json", help="write the JSON report to this file instead of stdout")
    check.set_defaults(func=cmd_check)

    simulate = commands.add_parser("simulate", help="simulate a scenario and classify the trajectory")
    simulate.add_argument("scenario")
    simulate.add_argument("--csv", help="write the trajectory to this CSV file")
    simulate.add_argument("--band-frac", type=float, default=None)
    simulate.add_argument("--hold-frac", type=float, default=None)
    simulate.set_defaults(func=cmd_simulate)

    sweep_cmd = commands.add_parser("sweep", help="two-parameter stability region")
    sweep_cmd.add_argument("sweepspec")
    sweep_cmd.add_argument("--csv", help="stem of the region CSV files")
    sweep_cmd.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to the CSV files")
    sweep_cmd.add_argument("--workers", type=int, default=None)
    sweep_cmd.set_defaults(func=cmd_sweep)

    rlc = commands.add_parser("rlc-bench", help="RLC circuit with a negative load: poles vs criteria")
    rlc.add_argument("--l", type=float, default=1.0)
    rlc.add_argument("--c", type=float, default=1.0)
    rlc.add_argument("--rl", type=float, default=-2.0)
    rlc.add_argument("--samples", type=int, default=1000)
    rlc.add_argument("--json", help="write the JSON report to this file")
    rlc.set_defaults(func=cmd_rlc_bench)

    compare = commands.add_parser("compare-controllers", help="proposed controller against its droop twin")
    compare.add_argument("scenario")
    compare.add_argument("--json", help="write the JSON comparison to this file")
    compare.set_defaults(func=cmd_compare_controllers)

    examples = commands.add_parser("gen-examples", help="write the built-in scenario documents")
    examples.add_argument("--dir", default="scenarios")
    examples.set_defaults(func=cmd_gen_examples)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_cli_logging(verbose=args.verbose, quiet=args.quiet)
    try:
        return args.func(args)
    except InputError as e:
        print("input error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT
    except (IOError, OSError) as e:
        print("input error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT
    except AnalysisError as e:
        print("analysis error: {}".format(e), file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
