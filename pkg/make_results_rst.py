#!/usr/bin/env python
"""Render saved ``tdsp-reduce experiment --save-yaml`` results into docs/results.rst."""
import os
import sys
import contextlib
import statistics
import collections

# 3rd party
import yaml
import tabulate

RESULTS_PATH = os.path.join(os.path.dirname(__file__), "data", "results")
RST_DEPTH = [None, "=", "-", "+", "^"]


def main():
    print('Loading experiment results... ', file=sys.stderr, end='', flush=True)
    experiments = load_experiments()
    print(f'{len(experiments)} files', file=sys.stderr)

    print('Writing docs/results.rst ... ', file=sys.stderr, end='', flush=True)
    with open('docs/results.rst', 'w') as fout, contextlib.redirect_stdout(fout):
        display_title("Experiment Results", 1)
        display_table_definitions()
        if not experiments:
            print("No results found in ``data/results``, see :ref:`experiments`.")
            print()
        for fname, data in experiments:
            display_experiment(fname, data)
    print('ok', file=sys.stderr)


def load_experiments():
    #
    # Suggest generating YAML files with something like:
    #     tdsp-reduce experiment --generator layered --n 10 20 30 --w 2 3 --repeat 3 \
    #         --save-yaml data/results/layered.yaml
    #
    if not os.path.isdir(RESULTS_PATH):
        return []
    result = []
    for fname in sorted(os.listdir(RESULTS_PATH)):
        yaml_path = os.path.join(RESULTS_PATH, fname)
        if fname.endswith(".yaml") and os.path.isfile(yaml_path):
            with open(yaml_path, "r") as fin:
                result.append((fname, yaml.safe_load(fin)))
    return result


def summarize_rows(rows):
    """One summary per (generator, n, w), aggregating over seeds."""
    groups = collections.defaultdict(list)
    for row in rows:
        groups[(row["generator"], row["n"], row["w"])].append(row)
    summary = []
    for (generator, n, w), group in sorted(groups.items()):
        breakpoints = [row["breakpoints"] for row in group]
        agrees = [row["oracle_agrees"] for row in group if row["oracle_agrees"] != ""]
        summary.append({
            "generator": generator,
            "n": n,
            "w": w,
            "instances": len(group),
            "td width": max(row["td_width"] for row in group),
            "K (mean)": f"{statistics.mean(row['K'] for row in group):.1f}",
            "breakpoints (mean)": f"{statistics.mean(breakpoints):.1f}",
            "breakpoints (max)": max(breakpoints),
            "max degree": max(row["max_degree"] for row in group),
            "parallel (mean)": f"{statistics.mean(row['parallel_count'] for row in group):.1f}",
            "seconds (mean)": f"{statistics.mean(row['wall_time'] for row in group):.3f}",
            "oracle": ("agrees" if all(agrees) else "DISAGREES") if agrees else "na",
        })
    return summary


def display_experiment(fname, data):
    arguments = data.get("session_arguments", {})
    display_title(fname, 2)
    print(f"Generator ``{arguments.get('generator')}``, "
          f"{arguments.get('pieces_per_edge')} pieces per edge function, "
          f"{arguments.get('repeat')} seeds from {arguments.get('seed')}, "
          f"run {data.get('datetime')} with Python {data.get('python_version')}.")
    print()
    print(tabulate.tabulate(summarize_rows(data["rows"]), headers="keys", tablefmt="rst"))
    print()


def display_table_definitions():
    print("Definitions:\n")
    print("- *td width*: width of the decomposition the generator provides.")
    print("- *K*: total number of linear pieces over both directions of every edge.")
    print("- *breakpoints*: breakpoints of the end-to-end arrival function from s to d.")
    print("- *max degree*: largest star-mesh degree used by the reduction.")
    print("- *parallel*: parallel reductions, a class of k edges counting k - 1.")
    print("- *oracle*: comparison with simple path enumeration, instances of 10 vertices or less.")
    print()


def display_title(text, depth):
    print(text)
    print(RST_DEPTH[depth] * len(text))
    print()


if __name__ == "__main__":
    main()
