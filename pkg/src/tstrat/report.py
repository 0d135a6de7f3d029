"""Benchmark report: run the bundled command corpus, write a CSV of run
statistics, and render comparison figures next to it.

``tstrat-bench --out DIR`` executes every bundled .tstrat command against
its model, writes ``report.csv`` (one row per command), and renders bar
charts comparing states explored across the sampling strategies and
breadth- versus depth-first search on the scheduler benchmark.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .analysis import Limits, run_command
from .bundled import builtin_model, bundled_strategy_names, bundled_strategy_text
from .parser import parse_command

CSV_FIELDS = ("benchmark", "model", "command", "status", "solutions",
              "first_clock", "states", "rule_apps", "time_ms")


def run_benchmarks(names=None, limits=None):
    """Run bundled commands; returns a list of row dicts (CSV_FIELDS keys)."""
    limits = limits or Limits(max_states=2_000_000, timeout=300.0)
    rows = []
    models = {}
    for name in names or bundled_strategy_names():
        text = bundled_strategy_text(name)
        cmd = parse_command(text, source=f"{name}.tstrat")
        if cmd.model not in models:
            models[cmd.model] = builtin_model(cmd.model)
        solutions, stats, status = run_command(cmd, models[cmd.model], limits)
        first_clock = ""
        if solutions and solutions[0].timed:
            first_clock = solutions[0].clock
        rows.append({
            "benchmark": name,
            "model": cmd.model,
            "command": getattr(cmd, "name", type(cmd).__name__[3:].lower()),
            "status": status,
            "solutions": len(solutions),
            "first_clock": first_clock,
            "states": stats.states_explored,
            "rule_apps": stats.rule_applications,
            "time_ms": round(stats.wall_ms, 1),
        })
    return rows


def write_csv(rows, path: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)


def _bar_chart(ax, labels, values, title, ylabel):
    ax.bar(range(len(labels)), values, color="#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_title(title, fontsize=10)
    ax.set_ylabel(ylabel, fontsize=9)
    ax.grid(axis="y", alpha=0.3)


def render_figures(rows, out_dir: str):
    """Render PNG comparison figures; returns the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_name = {r["benchmark"]: r for r in rows}
    written = []

    sampling = [n for n in ("rtt-fixed1-rtt20", "rtt-max4-rtt50", "rtt-mixed-rtt20")
                if n in by_name]
    if sampling:
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), constrained_layout=True)
        _bar_chart(axes[0], sampling, [by_name[n]["states"] for n in sampling],
                   "States explored per sampling strategy", "states")
        _bar_chart(axes[1], sampling, [by_name[n]["time_ms"] for n in sampling],
                   "Wall time per sampling strategy", "ms")
        path = os.path.join(out_dir, "fig_sampling.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    schedulers = [n for n in ("cash-miss-bfs", "cash-miss-dfs") if n in by_name]
    if schedulers:
        fig, axes = plt.subplots(1, 2, figsize=(7, 3.6), constrained_layout=True)
        _bar_chart(axes[0], schedulers, [by_name[n]["states"] for n in schedulers],
                   "Deadline-miss search: states", "states")
        _bar_chart(axes[1], schedulers, [by_name[n]["time_ms"] for n in schedulers],
                   "Deadline-miss search: wall time", "ms")
        path = os.path.join(out_dir, "fig_search_order.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="tstrat-bench",
        description="Run the bundled benchmark commands; write CSV and figures.")
    ap.add_argument("--out", "-o", default="bench-report",
                    help="output directory (created if missing)")
    ap.add_argument("--only", nargs="*", default=None,
                    help="benchmark names to run (default: all bundled)")
    ap.add_argument("--timeout", type=float, default=300.0,
                    help="per-command timeout in seconds")
    args = ap.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)
    rows = run_benchmarks(args.only, Limits(max_states=2_000_000, timeout=args.timeout))
    csv_path = os.path.join(args.out, "report.csv")
    write_csv(rows, csv_path)
    figures = render_figures(rows, args.out)
    print(f"wrote {csv_path}")
    for path in figures:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
