"""Command line front end: golden outputs, JSON determinism, exit codes."""

import json
from pathlib import Path

import pytest

from tsq.cli import SchemaError, load_problem, main, parse_split
from tsq.complexity import decision_tree_complexity
from tsq.tsym import xor_process

GOLDEN = Path(__file__).parent / "golden"
PROBLEMS = Path(__file__).parent.parent / "src" / "tsq" / "problems"

GOLDEN_COMMANDS = {
    "grover-external-n2-01.txt": ["grover-external", "--n", "2", "--outcome", "01"],
    "grover-solver-n2-01.txt": ["grover-solver", "--n", "2", "--outcome", "01"],
    "zigzag-external-n2-01.txt": [
        "ts-instance", "--n", "2", "--outcome", "01",
        "--split", "B:[10]/A:[01]", "--perspective", "external",
    ],
    "zigzag-solver-n2-01.txt": [
        "grover-solver", "--n", "2", "--outcome", "01", "--split", "A:[01]",
    ],
    "epr-direct-01.txt": ["epr", "--mode", "direct", "--outcome", "01"],
    "epr-costa-01.txt": ["epr", "--mode", "costa", "--outcome", "01"],
    "epr-ts-direct-01.txt": ["epr", "--mode", "ts", "--path", "direct", "--outcome", "01"],
    "epr-ts-via-t0-01.txt": ["epr", "--mode", "ts", "--path", "via-t0", "--outcome", "01"],
}


@pytest.mark.parametrize("golden_name", sorted(GOLDEN_COMMANDS))
def test_golden_output(golden_name, capsys):
    assert main(GOLDEN_COMMANDS[golden_name]) == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / golden_name).read_text()


def test_json_report_is_deterministic(capsys):
    argv = ["grover-solver", "--n", "2", "--outcome", "01", "--split", "A:[01]", "--output", "json"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    payload = json.loads(first)
    assert payload["schema_version"] == 1
    assert payload["scalars"]["branch_settings"] == ["01", "11"]
    rows = payload["tables"]["bottom line (backward) / input"]
    assert sorted((r["b"], r["a"], r["re"]) for r in rows) == [
        ("01", "00", 1.0),
        ("11", "00", 1.0),
    ]


def test_epr_json_scalars(capsys):
    assert main(["epr", "--mode", "ts", "--outcome", "01", "--output", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["scalars"]["emulation_max_deviation"] <= 1e-12
    assert payload["scalars"]["bottom_line_vs_direct"] <= 1e-12


def test_search_command(capsys):
    assert main(["search", "--n", "4", "--target", "0110", "--variant", "long"]) == 0
    out = capsys.readouterr().out
    assert "iterations (queries): 3" in out
    assert "success probability: 1" in out


def test_complexity_command(capsys):
    assert main(["complexity", "--problem", "grover", "--n", "2", "--k", "0", "--k", "0.5", "--k", "1"]) == 0
    out = capsys.readouterr().out
    rows = [l.split() for l in out.splitlines() if l.strip()[:1].isdigit()]
    assert [r[2] for r in rows] == ["3", "1", "0"]


def test_exit_code_config_errors(capsys):
    # split syntax, redundant split, missing split, oversized instance
    assert main(["grover-solver", "--n", "2", "--outcome", "01", "--split", "A=01"]) == 2
    assert main(["grover-solver", "--n", "2", "--outcome", "01", "--split", "B:[01]/A:[01]"]) == 2
    assert main(["ts-instance", "--n", "2", "--outcome", "01"]) == 2
    assert main(["complexity", "--problem", "grover", "--n", "5", "--k", "0"]) == 2
    assert main(["grover-external", "--n", "2", "--outcome", "7"]) == 2
    assert main(["complexity", "--problem", "file", "--k", "0"]) == 2
    capsys.readouterr()


def test_seeded_epr_is_deterministic(capsys):
    argv = ["epr", "--mode", "costa", "--outcome", "01", "--seed", "1", "--output", "json"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["seed"] == 1


def test_parse_split_auto_complement():
    process = xor_process(2)
    split = parse_split(process, "A:[01]")
    assert split.initial_part.masks == ("10",)
    split2 = parse_split(process, "B:[11]/A:[01]")
    assert split2.initial_part.masks == ("11",)
    with pytest.raises(ValueError):
        parse_split(process, "B:[10]")  # final part is mandatory


def test_load_bundled_problems():
    p = load_problem(PROBLEMS / "grover-n2.json")
    assert decision_tree_complexity(p, p.settings) == 3
    reduced = load_problem(PROBLEMS / "grover-n2-reduced.json")
    assert decision_tree_complexity(reduced, reduced.settings) == 1


def test_load_problem_schema_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(SchemaError):
        load_problem(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_problem(bad)
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text(json.dumps({
        "settings": ["00", "01"],
        "queries": ["00"],
        "answer": {"00": {"00": "1"}},
        "solution": {"00": "00", "01": "01"},
    }))
    with pytest.raises(SchemaError, match="01"):
        load_problem(incomplete)


def test_problem_file_via_cli(capsys, tmp_path):
    assert main([
        "complexity", "--problem", "file",
        "--problem-file", str(PROBLEMS / "grover-n2-reduced.json"),
        "--k", "0",
    ]) == 0
    assert "1" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main([
        "complexity", "--problem", "file", "--problem-file", str(bad), "--k", "0",
    ]) == 2
    capsys.readouterr()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
