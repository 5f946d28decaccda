"""Scenario runner and reporting front end.

Subcommands reproduce the zigzag tables as text, emit machine-readable JSON
reports, and ingest user-defined oracle problems from a JSON file.  Exit
codes: 0 success, 2 configuration/schema error, 3 numerical-invariant
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__, gf2, render
from .complexity import grover_problem, k_sweep, OracleProblemSpec
from .epr import direct_trace, costa_trace, emulation_check, make_scenario, ts_trace
from .grover import SearchOracle, run_grover, run_long
from .measure import ParityObservable, full_observable, project
from .qcore import InvariantError, apply
from .tsym import (
    SelectionSplit,
    external_instance,
    selection_is_injective,
    solver_instance,
    uneven_instance,
    xor_process,
)

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Problem file does not match the expected schema."""


@dataclass
class ScenarioConfig:
    kind: str
    params: dict
    output: str = "table"


@dataclass
class Report:
    scenario: dict
    seed: Optional[int]
    tables: dict = field(default_factory=dict)    # label -> amplitude rows
    rendered: dict = field(default_factory=dict)  # label -> text lines
    scalars: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "scenario": self.scenario,
            "seed": self.seed,
            "tables": self.tables,
            "scalars": self.scalars,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        chunks = []
        for label, lines in self.rendered.items():
            chunks.append(f"## {label}")
            chunks.extend(lines)
            chunks.append("")
        for key in sorted(self.scalars):
            chunks.append(f"{key}: {self.scalars[key]}")
        return "\n".join(chunks).rstrip() + "\n"


def _add_table(report: Report, label: str, lines: list[str], states: dict) -> None:
    report.rendered[label] = lines
    for name, state in states.items():
        report.tables[f"{label} / {name}"] = render.state_rows(state)


def parse_split(process, text: str) -> SelectionSplit:
    """Parse "B:[10]/A:[01]" or just "A:[01]" (initial part auto-completed)."""
    parts = {}
    for chunk in text.split("/"):
        chunk = chunk.strip()
        if ":" not in chunk:
            raise ValueError(f"bad split syntax {text!r}")
        reg, masks = chunk.split(":", 1)
        reg = reg.strip().upper()
        masks = masks.strip()
        if not (masks.startswith("[") and masks.endswith("]")):
            raise ValueError(f"bad split syntax {text!r}")
        mask_list = tuple(m.strip() for m in masks[1:-1].split(",") if m.strip())
        parts[reg] = mask_list
    if "A" not in parts:
        raise ValueError("split must name the final part, e.g. A:[01]")
    final_part = ParityObservable("A", parts["A"])
    if "B" in parts:
        split = SelectionSplit(ParityObservable("B", parts["B"]), final_part)
        if not selection_is_injective(process, split):
            raise ValueError(f"split {text!r} is redundant (selection not injective)")
        return split
    n = process.n
    final_ints = tuple(gf2.bits_to_mask(m) for m in final_part.masks)
    for basis in gf2.subspaces(n, n - final_part.rank):
        initial = ParityObservable("B", tuple(gf2.mask_to_bits(m, n) for m in basis))
        split = SelectionSplit(initial, final_part)
        if gf2.rank(final_ints + basis) == n and selection_is_injective(process, split):
            return split
    raise ValueError(f"no complementary initial part exists for {text!r}")


def _make_process(n: int, unitary: str):
    if unitary == "xor":
        return xor_process(n)
    if unitary == "grover-long":
        from .grover import grover_process

        return grover_process(n)
    raise ValueError(f"unknown unitary provider {unitary!r}")


def _run_grover_external(params: dict) -> Report:
    process = _make_process(params["n"], params.get("unitary", "xor"))
    b = params["outcome"]
    report = Report(scenario={"kind": "grover-external", **params}, seed=None)
    initial = process.initial_state
    selected = project(process.initial_obs.outcome_for(b), initial)
    output = apply(process.u12, selected)
    _add_table(
        report,
        "external description",
        render.external_ordinary_table(initial, selected, output),
        {"initial": initial, "t1 selected": selected, "t2 output": output},
    )
    if params.get("split"):
        split = parse_split(process, params["split"])
        inst = external_instance(process, b, split)
        _add_table(
            report,
            "external zigzag",
            render.external_zigzag_table(inst),
            dict(inst.trajectory),
        )
        report.scalars["instance"] = inst.name()
    return report


def _run_grover_solver(params: dict) -> Report:
    process = _make_process(params["n"], params.get("unitary", "xor"))
    b = params["outcome"]
    report = Report(scenario={"kind": "grover-solver", **params}, seed=None)
    initial = process.initial_state
    correlated = apply(process.u12, initial)
    selected = project(process.final_obs.outcome_for(process.solution(b)), correlated)
    _add_table(
        report,
        "relativized description",
        render.solver_ordinary_table(initial, correlated, selected),
        {"initial": initial, "t2 correlated": correlated, "t2 selected": selected},
    )
    if params.get("split"):
        split = parse_split(process, params["split"])
        inst = solver_instance(process, b, split)
        _add_table(report, "solver zigzag", render.solver_zigzag_table(inst), dict(inst.trajectory))
        _add_table(
            report,
            "bottom line (backward)",
            render.bottom_line_table(inst, "backward"),
            {"input": inst.bottom_line[0], "output": inst.bottom_line[1]},
        )
        _add_table(report, "bottom line (forward)", render.bottom_line_table(inst, "forward"), {})
        report.scalars["instance"] = inst.name()
        report.scalars["branch_settings"] = list(inst.branch_settings())
    return report


def _run_ts_instance(params: dict) -> Report:
    process = _make_process(params["n"], params.get("unitary", "xor"))
    b = params["outcome"]
    report = Report(scenario={"kind": "ts-instance", **params}, seed=None)
    if params.get("final_rank") is not None:
        inst = uneven_instance(process, b, params["final_rank"])
    else:
        if not params.get("split"):
            raise ValueError("ts-instance needs either --split or --final-rank")
        split = parse_split(process, params["split"])
        if params.get("perspective", "solver") == "external":
            inst = external_instance(process, b, split)
        else:
            inst = solver_instance(process, b, split)
    table = (
        render.external_zigzag_table(inst)
        if inst.perspective == "external"
        else render.solver_zigzag_table(inst)
    )
    _add_table(report, f"{inst.perspective} zigzag", table, dict(inst.trajectory))
    report.scalars["instance"] = inst.name()
    report.scalars["branch_settings"] = list(inst.branch_settings())
    return report


def _run_epr(params: dict) -> Report:
    seed = params.get("seed")
    scenario = make_scenario(seed=seed)
    outcome = params["outcome"]
    mode = params.get("mode", "direct")
    path = params.get("path") or ("via-t0" if mode == "costa" else "direct")
    report = Report(scenario={"kind": "epr", **params, "path": path}, seed=seed)
    if mode == "ts":
        split = SelectionSplit(
            ParityObservable("B", tuple(params.get("split_b", ("10",)))),
            ParityObservable("A", tuple(params.get("split_a", ("01",)))),
        )
        trace = ts_trace(scenario, outcome, split, via_t0=(path == "via-t0"))
    elif mode == "costa" or path == "via-t0":
        trace = costa_trace(scenario, outcome)
    else:
        trace = direct_trace(scenario, outcome)
    _add_table(report, f"{trace.kind} trace", render.epr_trace_table(trace), dict(trace.states))
    check = emulation_check(scenario, outcome)
    report.scalars["emulation_max_deviation"] = check.max_deviation
    if trace.kind in ("ts-direct", "ts-via-t0"):
        direct = direct_trace(scenario, outcome)
        from .qcore import max_abs_diff

        report.scalars["bottom_line_vs_direct"] = max_abs_diff(
            trace.bottom_line[1], direct.bottom_line[1]
        )
    return report


def _run_complexity(params: dict) -> Report:
    if params.get("problem_file"):
        problem = load_problem(Path(params["problem_file"]))
    else:
        problem = grover_problem(params["n"])
    ks = params["k"]
    reports = k_sweep(problem, ks)
    report = Report(scenario={"kind": "complexity", **params, "problem": problem.name}, seed=None)
    lines = [f"{'k':>6}  {'rank':>4}  {'worst_case':>10}  masks"]
    for r in reports:
        lines.append(
            f"{r.k:>6g}  {r.advice_rank:>4}  {r.worst_case:>10}  [{','.join(r.masks) or '-'}]"
        )
    report.rendered["complexity"] = lines
    report.scalars["reports"] = [
        {
            "k": r.k,
            "advice_rank": r.advice_rank,
            "masks": list(r.masks),
            "per_class": [
                {"parities": list(bits), "queries": count} for bits, count in r.per_class
            ],
            "worst_case": r.worst_case,
            "predicted_quantum": r.predicted_quantum,
        }
        for r in reports
    ]
    return report


def _run_search(params: dict) -> Report:
    oracle = SearchOracle(params["n"], params["target"])
    run = run_long(oracle) if params.get("variant", "long") == "long" else run_grover(oracle)
    report = Report(scenario={"kind": "search", **params}, seed=None)
    report.scalars.update(
        {
            "variant": run.variant,
            "iterations": run.iterations,
            "phase": run.phase,
            "success_probability": run.success_probability,
            "query_count": run.query_count,
        }
    )
    report.rendered["search"] = [
        f"variant: {run.variant}",
        f"iterations (queries): {run.iterations}",
        f"phase: {run.phase:.12g}",
        f"success probability: {run.success_probability:.12g}",
    ]
    return report


_RUNNERS = {
    "grover-external": _run_grover_external,
    "grover-solver": _run_grover_solver,
    "ts-instance": _run_ts_instance,
    "epr": _run_epr,
    "complexity": _run_complexity,
    "search": _run_search,
}


def run(config: ScenarioConfig) -> Report:
    if config.kind not in _RUNNERS:
        raise ValueError(f"unknown scenario kind {config.kind!r}")
    return _RUNNERS[config.kind](config.params)


def load_problem(path: Path) -> OracleProblemSpec:
    """Read an oracle problem from the JSON schema used by `complexity`."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"problem file not found: {path}")
    except json.JSONDecodeError as e:
        raise SchemaError(f"problem file is not valid JSON: {e}")
    for key in ("settings", "queries", "answer", "solution"):
        if key not in data:
            raise SchemaError(f"problem file missing required key {key!r}")
    settings = tuple(data["settings"])
    queries = tuple(data["queries"])
    answer = {}
    for b in settings:
        row = data["answer"].get(b)
        if row is None:
            raise SchemaError(f"answer table missing setting {b!r}")
        for q in queries:
            if q not in row:
                raise SchemaError(f"answer table missing entry for (setting, query) ({b!r}, {q!r})")
            answer[(b, q)] = str(row[q])
    solution = {}
    for b in settings:
        if b not in data["solution"]:
            raise SchemaError(f"solution missing setting {b!r}")
        solution[b] = str(data["solution"][b])
    try:
        return OracleProblemSpec(
            name=data.get("name", Path(path).stem),
            settings=settings,
            queries=queries,
            answer=answer,
            solution=solution,
        )
    except ValueError as e:
        raise SchemaError(str(e))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsq", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", choices=("table", "json"), default="table")

    p = sub.add_parser("grover-external", help="external (setter-side) description and zigzag")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--outcome", required=True, help="setting value, e.g. 01")
    p.add_argument("--split", help='selection split, e.g. "B:[10]/A:[01]"')
    p.add_argument("--unitary", choices=("xor", "grover-long"), default="xor")
    common(p)

    p = sub.add_parser("grover-solver", help="solver-side description and zigzag")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--outcome", required=True)
    p.add_argument("--split", help='selection split, e.g. "A:[01]"')
    p.add_argument("--unitary", choices=("xor", "grover-long"), default="xor")
    common(p)

    p = sub.add_parser("ts-instance", help="one time-symmetrization instance")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--outcome", required=True)
    p.add_argument("--perspective", choices=("external", "solver"), default="solver")
    p.add_argument("--split")
    p.add_argument("--final-rank", type=int, dest="final_rank")
    p.add_argument("--unitary", choices=("xor", "grover-long"), default="xor")
    common(p)

    p = sub.add_parser("epr", help="nonlocality traces on the redundant encoding")
    p.add_argument("--mode", choices=("direct", "costa", "ts"), default="direct")
    p.add_argument("--path", choices=("direct", "via-t0"))
    p.add_argument("--outcome", required=True)
    p.add_argument("--seed", type=int)
    common(p)

    p = sub.add_parser("complexity", help="advanced-knowledge query-count predictions")
    p.add_argument("--problem", choices=("grover", "file"), default="grover")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=float, action="append", required=True)
    p.add_argument("--problem-file", dest="problem_file")
    common(p)

    p = sub.add_parser("search", help="run the Grover or zero-failure search network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--variant", choices=("long", "grover"), default="long")
    common(p)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "output") and v is not None}
    if args.command == "complexity" and args.problem == "file" and not args.problem_file:
        print("error: --problem file requires --problem-file", file=sys.stderr)
        return 2
    config = ScenarioConfig(kind=args.command, params=params, output=args.output)
    try:
        report = run(config)
    except (ValueError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InvariantError as e:
        print(f"numerical invariant failure: {e}", file=sys.stderr)
        return 3
    sys.stdout.write(report.to_json() + "\n" if config.output == "json" else report.to_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
