"""Figure renderers for the report path: consume a result CSV, write
image files next to it."""

from __future__ import annotations

import os
from collections import defaultdict
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import ResultRow, read_csv


def _series(rows: Iterable[ResultRow], y_attr: str):
    """Group rows into (algo, workload) -> sorted [(n, mean y)] series."""
    cells: dict[tuple[str, str], dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        cells[(row.algo, row.workload)][row.n].append(float(getattr(row, y_attr)))
    out = {}
    for key, by_n in cells.items():
        out[key] = sorted((n, sum(v) / len(v)) for n, v in by_n.items())
    return out


def fig_amortized(rows: list[ResultRow], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (algo, workload), pts in sorted(_series(rows, "amortized").items()):
        ns = [n for n, _ in pts]
        ys = [y for _, y in pts]
        ax.plot(ns, ys, marker="o", label=f"{algo} / {workload}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("capacity n")
    ax.set_ylabel("amortized moves per operation")
    ax.set_title("Amortized cost")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_max_per_op(rows: list[ResultRow], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (algo, workload), pts in sorted(_series(rows, "max_per_op").items()):
        ns = [n for n, _ in pts]
        ys = [y for _, y in pts]
        ax.plot(ns, ys, marker="s", label=f"{algo} / {workload}")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("capacity n")
    ax.set_ylabel("worst single-operation moves")
    ax.set_title("Worst-case cost per operation")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_overheads(rows: list[ResultRow], path: str) -> None:
    layered = [r for r in rows if r.max_buffer_occupancy or r.rshell_moves]
    if not layered:
        layered = rows
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    for (algo, workload), pts in sorted(_series(layered, "max_buffer_occupancy").items()):
        ax1.plot([n for n, _ in pts], [y for _, y in pts], marker="o",
                 label=f"{algo} / {workload}")
    ax1.set_xscale("log", base=2)
    ax1.set_xlabel("capacity n")
    ax1.set_ylabel("peak buffered elements")
    ax1.set_title("Buffer pressure")
    ax1.grid(True, alpha=0.3)
    ax1.legend(fontsize=6)
    for (algo, workload), pts in sorted(_series(layered, "max_rebuild_span").items()):
        ax2.plot([n for n, _ in pts], [y for _, y in pts], marker="o",
                 label=f"{algo} / {workload}")
    ax2.set_xscale("log", base=2)
    ax2.set_xlabel("capacity n")
    ax2.set_ylabel("longest rebuild (operations)")
    ax2.set_title("Rebuild spans")
    ax2.grid(True, alpha=0.3)
    ax2.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(csv_path: str, outdir: str | None = None) -> list[str]:
    """Render the standard figure set for a result CSV; returns the
    written file paths."""
    rows = read_csv(csv_path)
    base = outdir or os.path.dirname(os.path.abspath(csv_path))
    os.makedirs(base, exist_ok=True)
    stem = os.path.splitext(os.path.basename(csv_path))[0]
    written = []
    for name, renderer in (
        ("amortized", fig_amortized),
        ("max_per_op", fig_max_per_op),
        ("overheads", fig_overheads),
    ):
        path = os.path.join(base, f"{stem}_{name}.png")
        renderer(rows, path)
        written.append(path)
    return written
