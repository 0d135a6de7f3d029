"""Command-line front end: load a model, parse a command, run, format.

Exit codes: 0 solutions found (or simulation completed), 1 no solutions,
2 usage or parse error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

from .analysis import AnalysisError, Limits, run_command
from .bundled import resolve_model_text
from .matching import EvalError
from .model import ModelError, load_model
from .parser import ParseError, parse_command
from .timedomain import INF

EXIT_OK = 0
EXIT_NO_SOLUTIONS = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

JSON_SCHEMA_VERSION = 1


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tstrat",
        description="Run timed-strategy analysis commands against a model.")
    ap.add_argument("--model", "-m", required=True,
                    help="model file path, or builtin name (rtt, rtt-idle, cash-lite)")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--command", "-e", help="command text to run")
    src.add_argument("--command-file", "-f", help="file containing the command")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--max-states", type=int, default=None,
                    help="abort after visiting this many states")
    ap.add_argument("--max-rounds", type=int, default=None,
                    help="abort beyond this many strategy rounds")
    ap.add_argument("--timeout", type=float, default=None,
                    help="abort after this many seconds")
    ap.add_argument("--stats", action="store_true",
                    help="report states/rule applications/wall time")
    ap.add_argument("--seed-order", choices=("discovery", "canonical"),
                    default="discovery",
                    help="solution order: search discovery order, or sorted "
                         "by canonical state text")
    return ap


def _history_json(history: dict):
    out = {}
    for k, v in sorted(history.items()):
        out[k] = "INF" if v is INF else v
    return out


def _solutions_json(solutions):
    out = []
    for sol in solutions:
        out.append({
            "clock": sol.state.clock if sol.timed else None,
            "entities": [e.canon for e in sol.state.config],
            "history": _history_json(sol.state.history),
            "stuck": sol.stuck,
            "rounds": sol.rounds,
        })
    return out


def render_text(solutions, stats, status, show_stats: bool) -> str:
    lines = []
    for i, sol in enumerate(solutions, start=1):
        lines.append(f"Solution {i}")
        lines.append(sol.text())
        lines.append("")
    if not solutions:
        lines.append("no solutions")
        lines.append("")
    if status == "budget-exhausted":
        lines.append("budget exhausted (results may be incomplete)")
        lines.append("")
    if show_stats:
        lines.append(stats.text_line())
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def render_json(command_name, solutions, stats, status, show_stats: bool) -> str:
    doc = {
        "schema": JSON_SCHEMA_VERSION,
        "command": command_name,
        "status": status,
        "solutions": _solutions_json(solutions),
    }
    if show_stats:
        doc["stats"] = stats.as_dict()
    return json.dumps(doc, indent=2) + "\n"


def _command_name(cmd) -> str:
    return getattr(cmd, "name", type(cmd).__name__.removeprefix("Cmd").lower())


def main(argv=None) -> int:
    ap = build_arg_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        source, text = resolve_model_text(args.model)
        model = load_model(text, source=source)
        if args.command_file:
            with open(args.command_file, encoding="utf-8") as fh:
                command_text = fh.read()
        else:
            command_text = args.command
        cmd = parse_command(command_text)
    except (ParseError, ModelError, AnalysisError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    limits = Limits(max_states=args.max_states, max_rounds=args.max_rounds,
                    timeout=args.timeout)
    try:
        solutions, stats, status = run_command(cmd, model, limits)
    except (AnalysisError, ModelError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.seed_order == "canonical":
        solutions = sorted(solutions, key=lambda s: s.state.canon)
    if args.format == "json":
        sys.stdout.write(render_json(_command_name(cmd), solutions, stats,
                                     status, args.stats))
    else:
        sys.stdout.write(render_text(solutions, stats, status, args.stats))
    if status == "budget-exhausted":
        return EXIT_BUDGET
    if not solutions:
        return EXIT_NO_SOLUTIONS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
