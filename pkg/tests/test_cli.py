"""Tests for the tdsp-reduce command line."""
# std imports
import csv
import json
import random
import functools

# 3rd party
import yaml
import pytest
import blessed

# local
import tdsp_reduce
from tdsp_reduce import run, main, parse_args
from tdsp_reduce.graph import write_graph
from tdsp_reduce.generators import chain

from .conftest import data_file


def invoke(*argv):
    return run(**parse_args(list(argv)))


def lines_of(capsys):
    return capsys.readouterr().out.splitlines()


def values_of(lines):
    return dict(line.split(": ", 1) for line in lines if ": " in line)


@pytest.fixture(autouse=True)
def plain_terminal(monkeypatch):
    monkeypatch.setattr(tdsp_reduce, "init_term", lambda: (
        blessed.Terminal(force_styling=None), functools.partial(print, end="", flush=True)))


@pytest.fixture
def write(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_validate_ok(capsys):
    assert invoke("validate", data_file("ladder.tdg"), "--td", data_file("ladder.td")) == 0
    (line,) = lines_of(capsys)
    assert line.endswith("8 vertices, 10 edges, valid")


def test_validate_non_fifo(capsys, write):
    path = write("late.tdg", "p tdg 2 1 2\ne 1 2 0:-1@1 0:1@1\n")
    assert invoke("validate", path) == 1
    lines = lines_of(capsys)
    assert "fifo: edge 1 (1->2)" in lines[0]
    assert lines[-1].endswith("1 violations")


def test_validate_uncovered_edge(capsys, write):
    td = write("bad.td", "s td 2 3 4\nb 1 1 2 3\nb 2 3 4\n1 2\n")
    assert invoke("validate", data_file("cycle4.tdg"), "--td", td) == 1
    assert "decomposition: edge_coverage: (1, 4)" in capsys.readouterr().out


def test_reduce_cycle4(capsys):
    assert invoke("reduce", data_file("cycle4.tdg"), "--td", data_file("cycle4.td")) == 0
    values = values_of(lines_of(capsys))
    assert values["A_sd"] == "0:2@1"
    assert values["A_ds"] == "0:2@1"
    assert values["star_mesh_count"] == "2"
    assert values["parallel_count"] == "1"
    assert values["breakpoints"] == "0"


def test_reduce_single_edge_echoes_function(capsys, write):
    path = write("edge.tdg", "p tdg 2 1 2\ne 1 2 0:1;4:5@2 0:3@1\n")
    assert invoke("reduce", path) == 0
    values = values_of(lines_of(capsys))
    assert values["A_sd"] == "0:1;4:5@2"
    assert values["A_ds"] == "0:3@1"
    assert values["steps"] == "0"


def test_reduce_disconnected(capsys, write):
    path = write("apart.tdg", "p tdg 3 1 3\ne 1 2 0:1@1 0:1@1\n")
    assert invoke("reduce", path) == 0
    values = values_of(lines_of(capsys))
    assert values["A_sd"] == "inf"
    assert values["breakpoints"] == "0"


def test_reduce_with_trace_and_checks(capsys):
    assert invoke("reduce", data_file("ladder.tdg"), "--td", data_file("ladder.td"),
                  "--emit-trace", "--check-steps", "--seed", "4") == 0
    lines = lines_of(capsys)
    assert sum(line.startswith("star_mesh removed=") for line in lines) == 6
    assert any(line.startswith("check-steps: PASS") for line in lines)


def test_reduce_separators_agree(capsys):
    invoke("reduce", data_file("ladder.tdg"), "--td", data_file("ladder.td"))
    direct = values_of(lines_of(capsys))
    invoke("reduce", data_file("ladder.tdg"), "--td", data_file("ladder.td"), "--separators")
    divided = values_of(lines_of(capsys))
    assert divided["A_sd"] == direct["A_sd"]
    assert divided["A_ds"] == direct["A_ds"]
    assert divided["separator_contraction_count"] == "1"


def test_reduce_invalid_decomposition(capsys):
    assert invoke("reduce", data_file("ladder.tdg"), "--td", data_file("cycle4.td")) == 1
    assert "violation" in capsys.readouterr().out


def test_reduce_save_yaml(capsys, tmp_path):
    target = tmp_path / "result.yaml"
    assert invoke("reduce", data_file("path.tdg"), "--save-yaml", str(target)) == 0
    saved = yaml.safe_load(target.read_text())
    assert saved["A_sd"] == "0:3@1"
    assert saved["summary"]["star_mesh_count"] == 1
    assert saved["session_arguments"]["separators"] is False


def test_parse_error_exit_status(capsys, write):
    path = write("broken.tdg", "p tdg 2 1 2\ne 1 2 0:1@1\n")
    assert invoke("reduce", path) == 2
    assert invoke("validate", str(path) + ".missing") == 2


def test_oracle_table(capsys):
    assert invoke("oracle", data_file("path.tdg"), "0", "1/2") == 0
    lines = lines_of(capsys)
    assert lines[0].split() == ["t", "1*", "2", "3*"]
    assert lines[2].split() == ["0", "0", "1", "3"]
    assert lines[3].split() == ["1/2", "1/2", "3/2", "7/2"]


def test_oracle_full_and_bstat(capsys):
    assert invoke("oracle", data_file("cycle4.tdg"), "--full", "--bstat") == 0
    values = values_of(lines_of(capsys))
    assert values["A_sd"] == "0:2@1"
    assert values["max_breakpoints"] == "0"
    assert values["pair"] == "1 2"


def test_oracle_full_size_guard(capsys, tmp_path):
    target = tmp_path / "long.tdg"
    write_graph(chain(13, random.Random(0)).graph, target)
    assert invoke("oracle", str(target), "--full") == 1
    assert invoke("oracle", str(target), "3") == 0


def test_experiment_csv_is_reproducible(capsys):
    argv = ("experiment", "--generator", "random_partial_ktree", "--n", "6", "9",
            "--w", "2", "--repeat", "2", "--no-timing", "--crosscheck")
    assert invoke(*argv) == 0
    first = capsys.readouterr().out
    assert invoke(*argv) == 0
    assert capsys.readouterr().out == first
    rows = list(csv.DictReader(first.splitlines()))
    assert len(rows) == 4
    assert {row["oracle_agrees"] for row in rows} == {"true"}
    assert {row["wall_time"] for row in rows} == {"0"}


def test_experiment_degenerate_json(capsys):
    assert invoke("experiment", "--generator", "chain", "--n", "2", "--w", "1",
                  "--format", "json", "--no-timing") == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert row["star_mesh_count"] == 0
    assert row["oracle_agrees"] == ""


def test_experiment_chain_breakpoints(capsys):
    assert invoke("experiment", "--generator", "chain", "--n", "12", "20", "--w", "1",
                  "--pieces-per-edge", "3", "--repeat", "3") == 0
    for row in csv.DictReader(capsys.readouterr().out.splitlines()):
        assert int(row["breakpoints"]) <= int(row["K"])


def test_experiment_layered_growth(capsys):
    ns = ("10", "20", "30", "40", "50", "60")
    assert invoke("experiment", "--generator", "layered", "--n", *ns, "--w", "2", "3",
                  "--no-timing", "--crosscheck") == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 12
    keys = [(int(row["n"]), int(row["w"])) for row in rows]
    assert keys == sorted(keys)
    for row in rows:
        n = int(row["n"])
        assert int(row["star_mesh_count"]) == n - 2
        assert 0 <= int(row["breakpoints"])
        assert int(row["max_degree"]) <= int(row["td_width"]) + 1
        assert row["oracle_agrees"] == ("true" if n <= 10 else "")


def test_experiment_bad_config(capsys):
    assert invoke("experiment", "--n", "1") == 2


def test_claim1_ladder(capsys, tmp_path):
    target = tmp_path / "claim1.yaml"
    assert invoke("claim1", data_file("ladder.tdg"), "--td", data_file("ladder.td"),
                  "--save-yaml", str(target)) == 0
    values = values_of(lines_of(capsys))
    assert values["separator"] == "2 6"
    assert values["sides"] == "4 2"
    assert values["equal"] == "yes"
    assert yaml.safe_load(target.read_text())["equal"] is True


def test_claim1_too_small(capsys):
    assert invoke("claim1", data_file("cycle4.tdg"), "--td", data_file("cycle4.td")) == 1


@pytest.mark.parametrize("argv", [
    [],
    ["reduce", "x.tdg", "--separators", "--check-steps"],
    ["experiment", "--repeat", "0"],
    ["experiment", "--generator", "grid"],
    ["oracle", "x.tdg", "soon"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc_info:
        parse_args(argv)
    assert exc_info.value.code == 2


def test_main_exits_with_status(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["reduce", data_file("path.tdg")])
    assert exc_info.value.code == 0
