"""Figure builders over cavitysr CSV tables.

Two figure families cover the standard presentation of these runs:
time-resolved observables on a (usually logarithmic) axis, one curve per
input file, and risetime-versus-parameter curves from sweep tables.
Rendering is deterministic for fixed inputs and style.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import check_same_schema, read_table

_LABELS = {
    "n_over_N": r"$\langle n\rangle/N$",
    "n_mean": r"$\langle n\rangle$",
    "coherence": r"$|\langle\sigma^+\rangle|$",
    "sz": r"$\langle\sigma^z\rangle$",
    "j2": r"$\langle J^2\rangle$",
    "tau_fs": r"risetime $\tau$ (fs)",
}

DEFAULT_STYLE = {
    "figsize_w": 4.8,
    "figsize_h": 3.4,
    "dpi": 150,
    "grid": 1,
    "legend": 1,
}


def load_style(path=None) -> dict:
    """Small key = value style file; unknown keys rejected."""
    style = dict(DEFAULT_STYLE)
    if path is None:
        return style
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in style:
                raise ValueError(f"unknown style key {key!r}")
            style[key] = float(value)
    return style


@dataclass
class PlotSpec:
    """Inputs and axes of one figure."""

    inputs: list
    labels: list = field(default_factory=list)
    y_column: str = "n_over_N"
    x_column: str = "t_fs"
    logy: bool = True
    output: str = "figure.png"
    title: str = ""
    style: dict = field(default_factory=lambda: dict(DEFAULT_STYLE))

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("need at least one input CSV")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError("one label per input, or none")


def _new_axes(style):
    fig, ax = plt.subplots(
        figsize=(style["figsize_w"], style["figsize_h"]),
        dpi=int(style["dpi"]))
    if style["grid"]:
        ax.grid(True, which="both", alpha=0.3, linewidth=0.5)
    return fig, ax


def plot_dynamics(spec: PlotSpec) -> str:
    """One curve per input trajectory CSV; returns the output path."""
    tables = [read_table(path) for path in spec.inputs]
    check_same_schema(tables)
    labels = spec.labels or [t.solver or f"run {i}"
                             for i, t in enumerate(tables)]
    fig, ax = _new_axes(spec.style)
    for table, label in zip(tables, labels):
        x = table[spec.x_column]
        y = table[spec.y_column]
        if spec.logy:
            mask = y > 0
            ax.semilogy(x[mask], y[mask], label=label, linewidth=1.2)
        else:
            ax.plot(x, y, label=label, linewidth=1.2)
    ax.set_xlabel("t (fs)")
    ax.set_ylabel(_LABELS.get(spec.y_column, spec.y_column))
    if spec.title:
        ax.set_title(spec.title)
    if spec.style["legend"]:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, metadata=_clean_metadata(spec.output))
    plt.close(fig)
    return spec.output


def plot_risetime(spec: PlotSpec) -> str:
    """Risetime vs swept parameter from sweep CSVs (defined points only)."""
    tables = [read_table(path) for path in spec.inputs]
    check_same_schema(tables)
    labels = spec.labels or [t.solver or f"run {i}"
                             for i, t in enumerate(tables)]
    fig, ax = _new_axes(spec.style)
    plotted = 0
    for table, label in zip(tables, labels):
        value = table["value"]
        tau = table["tau_fs"]
        defined = (table["well_defined"] > 0) & np.isfinite(tau)
        if not defined.any():
            bad = ", ".join(f"{v:g}" for v in value)
            raise ValueError(
                f"{table.path}: no well-defined risetime at any swept "
                f"value ({bad})")
        ax.plot(value[defined], tau[defined], "o-", markersize=3.5,
                linewidth=1.1, label=label)
        plotted += defined.sum()
    ax.set_xlabel(spec.x_column if spec.x_column != "t_fs" else "value")
    ax.set_ylabel(_LABELS["tau_fs"])
    if spec.title:
        ax.set_title(spec.title)
    if spec.style["legend"]:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, metadata=_clean_metadata(spec.output))
    plt.close(fig)
    return spec.output


def _clean_metadata(output):
    """Strip run-dependent metadata so identical inputs give identical
    bytes."""
    name = str(output).lower()
    if name.endswith(".png"):
        return {"Software": "plotkit"}
    if name.endswith(".svg"):
        return {"Date": None}
    return None
