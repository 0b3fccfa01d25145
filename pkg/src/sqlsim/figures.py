"""Matplotlib renderings of benchmark reports.

Two figures per report: median wall time per backend across the sweep, and
final/peak row counts across the sweep. Written next to the delimited report
so a bench run leaves CSV + JSON + PNGs in one place.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchReport, summarize


def _sweep_axis(report: BenchReport) -> tuple[str, bool]:
    """Pick the x axis: the single swept numeric parameter if there is one."""
    swept = [
        name
        for name, values in report.scenario.parameters.items()
        if len(values) > 1
    ]
    if len(swept) == 1 and all(
        isinstance(v, (int, float)) for v in report.scenario.parameters[swept[0]]
    ):
        return swept[0], True
    return "point", False


def render_report_figures(report: BenchReport, out_dir: str | Path,
                          stem: str = "bench") -> list[Path]:
    """Write walltime and row-count figures; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    axis_name, numeric = _sweep_axis(report)
    summary = summarize(report)

    per_backend: dict[str, list[dict]] = {}
    for entry in summary:
        per_backend.setdefault(entry["backend"], []).append(entry)

    points = report.scenario.points()

    def x_values(entries: list[dict]) -> list:
        if numeric:
            xs = []
            for entry in entries:
                pairs = dict(p.split("=", 1) for p in entry["params"].split(";"))
                xs.append(float(pairs[axis_name]))
            return xs
        index = {
            ";".join(f"{k}={v}" for k, v in point.items()): pos
            for pos, point in enumerate(points)
        }
        return [index.get(entry["params"], 0) for entry in entries]

    paths = []

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for backend, entries in per_backend.items():
        usable = [e for e in entries if e["median_wall_ns"] is not None]
        if not usable:
            continue
        ax.plot(
            x_values(usable),
            [e["median_wall_ns"] / 1e6 for e in usable],
            marker="o",
            label=backend,
        )
    ax.set_xlabel(axis_name)
    ax.set_ylabel("median wall time [ms]")
    ax.set_yscale("log")
    ax.set_title(f"{report.scenario.family}: wall time")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    walltime_path = out / f"{stem}_walltime.png"
    fig.savefig(walltime_path, dpi=150)
    plt.close(fig)
    paths.append(walltime_path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for backend, entries in per_backend.items():
        usable = [e for e in entries if e["mean_final_rows"] is not None]
        if not usable:
            continue
        ax.plot(
            x_values(usable),
            [e["mean_final_rows"] for e in usable],
            marker="o",
            label=f"{backend} final",
        )
        ax.plot(
            x_values(usable),
            [e["mean_peak_rows"] for e in usable],
            marker="x",
            linestyle="--",
            label=f"{backend} peak",
        )
    ax.set_xlabel(axis_name)
    ax.set_ylabel("state rows")
    ax.set_yscale("log")
    ax.set_title(f"{report.scenario.family}: state-table growth")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    rows_path = out / f"{stem}_rows.png"
    fig.savefig(rows_path, dpi=150)
    plt.close(fig)
    paths.append(rows_path)

    return paths
