#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
tdsp-reduce: exact end-to-end arrival functions of time-dependent networks.

Every edge of an undirected network carries a pair of piecewise-linear FIFO
arrival functions, one per direction.  The earliest arrival at ``d`` as a
function of the departure time from ``s`` is computed exactly, in rational
arithmetic, by reducing the network to a single edge with parallel
reductions and star-mesh transformations, guided by a tree decomposition.

Subcommands:

- ``validate``: check a graph file, and a ``.td`` decomposition if given.
- ``reduce``: compute ``A_sd`` and ``A_ds`` with a reduction trace.
- ``oracle``: time-dependent Dijkstra arrivals, or path enumeration.
- ``experiment``: reduce generated instance families, emit CSV or JSON rows.
- ``claim1``: compare ``A_sd`` with that of the balanced separator graph.
"""
# std imports
import os
import sys
import csv
import json
import logging
import argparse
import datetime
import platform
import functools
from fractions import Fraction

# 3rd party
import yaml
import blessed
import tabulate

# local
from tdsp_reduce import pwl
from tdsp_reduce.graph import read_graph, validate
from tdsp_reduce.errors import TdspError, ParseError, ConfigError
from tdsp_reduce.oracle import (StepChecker,
                                arrival_table,
                                enumerate_paths_arrival,
                                max_end_to_end_breakpoints)
from tdsp_reduce.reduction import (format_trace,
                                   claim1_check,
                                   trace_summary,
                                   reduce_to_terminals,
                                   reduce_by_separators)
from tdsp_reduce.treedecomp import (read_decomposition,
                                    validate_decomposition,
                                    heuristic_decomposition)
from tdsp_reduce.generators import (GENERATORS,
                                    CSV_COLUMNS,
                                    format_csv_value,
                                    experiment_rows,
                                    experiment_configs)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

if (sys.version_info.major, sys.version_info.minor) > (3, 10):
    DATE_NOW = datetime.datetime.now(datetime.UTC).strftime("%Y-%m-%d %H:%M:%S UTC")
else:
    DATE_NOW = datetime.datetime.utcnow().strftime("%Y-%m-%d %H:%M:%S UTC")


def init_term():
    term = blessed.Terminal()
    writer = functools.partial(print, end="", flush=True)
    return term, writer


def display_args(arguments):
    return ", ".join(f"{k}={v}" for k, v in arguments.items())


def display_verdict(term, ok, passed="PASS", failed="FAIL"):
    return term.green(passed) if ok else term.firebrick1(failed)


def display_value(value):
    return pwl.format_function(value) if isinstance(value, pwl.PwlFunction) else str(value)


def load_decomposition(graph, td):
    if td:
        return read_decomposition(td)
    decomposition = heuristic_decomposition(graph)
    log.info("no decomposition given, min-fill heuristic found %d bags", len(decomposition))
    return decomposition


def report_violations(term, writer, graph, decomposition=None):
    """Write graph and decomposition violations one per line; return how many."""
    violations = [f"fifo: {violation}" for violation in validate(graph)]
    if decomposition is not None:
        violations += [f"decomposition: {violation}"
                       for violation in validate_decomposition(graph, decomposition)]
    for violation in violations:
        writer(f"{term.firebrick1('violation')} {violation}\n")
    return len(violations)


def cmd_validate(term, writer, graph_file, td):
    graph = read_graph(graph_file)
    decomposition = read_decomposition(td) if td else None
    count = report_violations(term, writer, graph, decomposition)
    writer(f"{graph_file}: {len(graph)} vertices, {len(graph.edges)} edges, "
           f"{display_verdict(term, not count, 'valid', f'{count} violations')}\n")
    return EXIT_FAILURE if count else EXIT_OK


def cmd_reduce(term, writer, graph_file, td, emit_trace, check_steps, separators, seed, save_yaml):
    graph = read_graph(graph_file)
    decomposition = load_decomposition(graph, td)
    if report_violations(term, writer, graph, decomposition):
        return EXIT_FAILURE
    checker = StepChecker(graph, seed=seed) if check_steps else None
    if separators:
        A_sd, A_ds, trace = reduce_by_separators(graph, decomposition)
    else:
        A_sd, A_ds, trace = reduce_to_terminals(graph, decomposition, on_step=checker)
    writer(f"A_sd: {A_sd}\n")
    writer(f"A_ds: {A_ds}\n")
    writer(f"breakpoints: {pwl.breakpoint_count(A_sd)}\n")
    if emit_trace:
        writer(format_trace(trace))
    summary = trace_summary(trace)
    for key, value in summary.items():
        writer(f"{key}: {value}\n")
    if checker is not None:
        writer(f"check-steps: {display_verdict(term, True)} ({checker.checks} comparisons)\n")
    if save_yaml:
        do_save_yaml(
            save_yaml,
            session_arguments=dict(graph_file=graph_file, td=td, separators=separators,
                                   check_steps=check_steps),
            A_sd=display_value(A_sd),
            A_ds=display_value(A_ds),
            breakpoints=pwl.breakpoint_count(A_sd),
            summary=summary,
            trace=[str(step) for step in trace.steps],
            python_version=platform.python_version(),
            datetime=DATE_NOW,
        )
    return EXIT_OK


def cmd_oracle(term, writer, graph_file, times, full, bstat):
    graph = read_graph(graph_file)
    s, d = graph.terminals
    if full:
        function = enumerate_paths_arrival(graph, s, d)
        writer(f"A_sd: {function}\n")
        writer(f"breakpoints: {pwl.breakpoint_count(function)}\n")
    if bstat:
        count, pair = max_end_to_end_breakpoints(graph)
        writer(f"max_breakpoints: {count}\n")
        writer(f"pair: {' '.join(map(str, pair)) if pair else '-'}\n")
    if times or not (full or bstat):
        rows = [
            [display_value(result.departure)]
            + [display_value(result.arrivals[vertex]) for vertex in graph.vertices]
            for result in arrival_table(graph, s, times or [0])
        ]
        headers = ["t"] + [f"{vertex}*" if vertex in (s, d) else str(vertex)
                           for vertex in graph.vertices]
        writer(tabulate.tabulate(rows, headers=headers) + "\n")
    return EXIT_OK


def cmd_experiment(term, writer, generator, n, w, seed, pieces_per_edge, repeat,
                   output_format, no_timing, crosscheck, save_yaml):
    configs = experiment_configs(generator, n, w, seed, pieces_per_edge, repeat)
    rows = experiment_rows(configs, timing=not no_timing, crosscheck=crosscheck)
    if output_format == "csv":
        out = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
        out.writeheader()
        out.writerows({key: format_csv_value(value) for key, value in row.items()} for row in rows)
    else:
        writer(json.dumps(rows, indent=2) + "\n")
    if save_yaml:
        do_save_yaml(
            save_yaml,
            session_arguments=dict(generator=generator, n=list(n), w=list(w), seed=seed,
                                   pieces_per_edge=pieces_per_edge, repeat=repeat),
            rows=rows,
            python_version=platform.python_version(),
            system=platform.system(),
            datetime=DATE_NOW,
        )
    disagree = [row for row in rows if row["oracle_agrees"] is False]
    for row in disagree:
        log.error("oracle disagrees: %s", display_args(row))
    return EXIT_FAILURE if disagree else EXIT_OK


def cmd_claim1(term, writer, graph_file, td, save_yaml):
    graph = read_graph(graph_file)
    decomposition = load_decomposition(graph, td)
    if report_violations(term, writer, graph, decomposition):
        return EXIT_FAILURE
    report = claim1_check(graph, decomposition)
    original, contracted = report.breakpoints
    writer(f"separator: {' '.join(map(str, report.separator))}\n")
    writer(f"sides: {report.side_sizes[0]} {report.side_sizes[1]}\n")
    writer(f"A_sd: {report.original}\n")
    writer(f"A_sd_separator_graph: {report.contracted}\n")
    writer(f"breakpoints: {original} {contracted}\n")
    writer(f"equal: {display_verdict(term, report.equal, 'yes', 'no')}\n")
    if save_yaml:
        do_save_yaml(
            save_yaml,
            session_arguments=dict(graph_file=graph_file, td=td),
            separator=list(report.separator),
            side_sizes=list(report.side_sizes),
            A_sd=str(report.original),
            A_sd_separator_graph=str(report.contracted),
            breakpoints=[original, contracted],
            equal=report.equal,
            datetime=DATE_NOW,
        )
    return EXIT_OK if report.equal else EXIT_FAILURE


COMMANDS = {
    "validate": cmd_validate,
    "reduce": cmd_reduce,
    "oracle": cmd_oracle,
    "experiment": cmd_experiment,
    "claim1": cmd_claim1,
}


def run(command, loglevel, **kwargs):
    """Program entry point."""
    logging.basicConfig(level=getattr(logging, loglevel),
                        format="%(levelname)s %(name)s: %(message)s")
    term, writer = init_term()
    log.debug("tdsp-reduce %s: %s", command, display_args(kwargs))
    try:
        return COMMANDS[command](term, writer, **kwargs)
    except (ParseError, ConfigError) as err:
        log.error("%s", err)
        return EXIT_USAGE
    except OSError as err:
        log.error("%s: %s", err.filename, err.strerror)
        return EXIT_USAGE
    except TdspError as err:
        log.error("%s", err)
        return EXIT_FAILURE


def do_save_yaml(save_yaml, **kwargs):
    with open(save_yaml, "w", encoding="utf-8") as fout:
        yaml.safe_dump(kwargs, fout, sort_keys=True)


def _add_graph_arguments(parser, td_help):
    parser.add_argument("graph_file", help="graph file ('p tdg' format)")
    parser.add_argument("--td", default=None, help=td_help)


def _add_save_yaml(parser):
    parser.add_argument("--save-yaml", default=None, help="Save results to given filepath as yaml")


def parse_args(argv=None):
    args = argparse.ArgumentParser(prog="tdsp-reduce", description=__doc__.split("\n\n")[0].strip())
    args.add_argument(
        "--loglevel",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="logging level of diagnostics written to stderr",
    )
    commands = args.add_subparsers(dest="command", required=True)

    validate_cmd = commands.add_parser("validate", help="check FIFO edges and a tree decomposition")
    _add_graph_arguments(validate_cmd, "tree decomposition (PACE .td format) to check")

    reduce_cmd = commands.add_parser("reduce", help="compute the end-to-end arrival functions")
    _add_graph_arguments(reduce_cmd, "tree decomposition to guide the reduction, "
                                     "otherwise the min-fill heuristic is used")
    reduce_cmd.add_argument("--emit-trace", action="store_true", default=False,
                            help="print every transformation, one per line")
    reduce_cmd.add_argument("--check-steps", action="store_true", default=False,
                            help=("verify with time-dependent Dijkstra that every "
                                  "transformation keeps the s-d arrival function"))
    reduce_cmd.add_argument("--separators", action="store_true", default=False,
                            help="divide and conquer over balanced separators")
    reduce_cmd.add_argument("--seed", type=int, default=0,
                            help="seed of the random departure times used by --check-steps")
    _add_save_yaml(reduce_cmd)

    oracle_cmd = commands.add_parser("oracle", help="slow reference computations")
    oracle_cmd.add_argument("graph_file", help="graph file ('p tdg' format)")
    oracle_cmd.add_argument("times", nargs="*", type=Fraction,
                            help="departure times from s (default 0 unless --full or --bstat)")
    oracle_cmd.add_argument("--full", action="store_true", default=False,
                            help="enumerate simple paths for the whole s-d function")
    oracle_cmd.add_argument("--bstat", action="store_true", default=False,
                            help="largest breakpoint count over all ordered vertex pairs")

    experiment_cmd = commands.add_parser("experiment", help="breakpoint growth on generated families")
    experiment_cmd.add_argument("--generator", default="layered", choices=GENERATORS)
    experiment_cmd.add_argument("--n", type=int, nargs="+", default=[10], help="vertex counts")
    experiment_cmd.add_argument("--w", type=int, nargs="+", default=[2], help="width parameters")
    experiment_cmd.add_argument("--seed", type=int, default=0, help="first seed")
    experiment_cmd.add_argument("--pieces-per-edge", type=int, default=2,
                                help="linear pieces of every generated edge function")
    experiment_cmd.add_argument("--repeat", type=int, default=1,
                                help="instances per (n, w), with consecutive seeds")
    experiment_cmd.add_argument("--format", dest="output_format", default="csv", choices=("csv", "json"))
    experiment_cmd.add_argument("--no-timing", action="store_true", default=False,
                                help="report wall_time 0 for byte-identical reruns")
    experiment_cmd.add_argument("--crosscheck", action="store_true", default=False,
                                help="compare with path enumeration for n <= 10")
    _add_save_yaml(experiment_cmd)

    claim1_cmd = commands.add_parser("claim1", help="compare A_sd with the separator graph's")
    _add_graph_arguments(claim1_cmd, "tree decomposition to find the balanced separator")
    _add_save_yaml(claim1_cmd)

    results = vars(args.parse_args(argv))
    if results.get("separators") and results.get("check_steps"):
        args.error("--check-steps cannot be used with --separators")
    if results.get("repeat", 1) < 1:
        args.error("--repeat must be at least 1")
    if results.get("save_yaml"):
        results["save_yaml"] = os.path.expanduser(results["save_yaml"])
    return results


def main(argv=None):
    sys.exit(run(**parse_args(argv)))


if __name__ == "__main__":
    main()
