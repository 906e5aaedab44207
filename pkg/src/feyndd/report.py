"""Delimited output and figure rendering for family sweeps.

The ``scaling`` command runs one task over a circuit family at several sizes,
writes the measurements as CSV and renders a matplotlib figure next to it.
Everything here is presentation; the numbers come from the engine.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import engine  # noqa: E402
from .circuit import (  # noqa: E402
    Circuit,
    GateSetConfig,
    generate_bv,
    generate_ghz,
    generate_linear_network,
)

__all__ = ["ScanRow", "run_scan", "write_csv", "render_figure", "render_histogram"]

CSV_FIELDS = ["family", "n", "k", "gates", "task", "dd_nodes", "peak_nodes", "seconds"]


@dataclass
class ScanRow:
    family: str
    n: int
    k: int | None
    gates: int
    task: str
    dd_nodes: int
    peak_nodes: int
    seconds: float


def generate_family(family: str, n: int, k: int | None, seed: int) -> Circuit:
    if family == "ghz":
        return generate_ghz(n)
    if family == "bv":
        return generate_bv(n)
    if family == "linear":
        if k is None:
            raise ValueError("the linear family needs k")
        return generate_linear_network(n, k, seed)[0]
    raise ValueError(f"unknown circuit family {family!r}")


def run_scan(family: str, sizes: list[int], k: int | None, seed: int,
             gateset: GateSetConfig, opts: engine.SimOptions) -> list[ScanRow]:
    rows = []
    for n in sizes:
        circuit = generate_family(family, n, k, seed)
        start = time.monotonic()
        _, stats = engine.amplitude(circuit, gateset, "0" * n, opts)
        elapsed = time.monotonic() - start
        rows.append(ScanRow(family, n, k, len(circuit.gates), "amplitude",
                            stats.dd_nodes, stats.peak_nodes, elapsed))
    return rows


def write_csv(rows: list[ScanRow], path: str) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([row.family, row.n, row.k if row.k is not None else "",
                             row.gates, row.task, row.dd_nodes, row.peak_nodes,
                             f"{row.seconds:.6f}"])


def render_figure(rows: list[ScanRow], path: str) -> None:
    """Diagram size and wall time against circuit width, one panel each."""
    sizes = [row.n for row in rows]
    fig, (ax_nodes, ax_time) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_nodes.plot(sizes, [row.dd_nodes for row in rows], "o-", label="final")
    ax_nodes.plot(sizes, [row.peak_nodes for row in rows], "s--", label="peak")
    ax_nodes.set_xlabel("qubits")
    ax_nodes.set_ylabel("diagram nodes")
    ax_nodes.set_title(f"{rows[0].family}: diagram size")
    ax_nodes.legend()
    ax_time.plot(sizes, [row.seconds for row in rows], "o-")
    ax_time.set_xlabel("qubits")
    ax_time.set_ylabel("seconds")
    ax_time.set_title(f"{rows[0].family}: {rows[0].task} time")
    for ax in (ax_nodes, ax_time):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_histogram(samples: list[str], path: str) -> None:
    """Bar chart of sampled bitstring frequencies."""
    counts: dict[str, int] = {}
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
    keys = sorted(counts)
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(keys)), 3.5))
    ax.bar(range(len(keys)), [counts[k] for k in keys])
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=90 if len(keys) > 8 else 0, fontsize=8)
    ax.set_ylabel("shots")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
