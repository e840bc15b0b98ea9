"""Figure builders and the file-to-image entry points.

Each plot_* call parses and validates first, then renders, so malformed
input never leaves a partial image behind. Alongside every image it
writes `<image>.data.json` with the exact plotted values; reruns on the
same input produce byte-identical dumps.
"""

import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .inputs import GAP_FLOOR, StudyData, TraceTable, load_study, load_trace_table

_AXIS_LABELS = {
    "sampling_m": "perturbations per epoch m",
    "dimension_d": "dimension d",
}


def build_convergence_figure(table: TraceTable):
    """One median-over-seeds line per solver, gap on a log axis."""
    data = {"kind": "convergence", "gap_floor": GAP_FLOOR, "curves": []}
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for solver in table.solvers():
        epochs, gaps = table.curve(solver)
        ax.plot(epochs, gaps, marker="o", markersize=3.5, label=solver)
        data["curves"].append({"solver": solver, "epoch": epochs,
                               "gap": gaps})
    ax.set_yscale("log")
    ax.set_xlabel("epoch")
    ax.set_ylabel("optimality gap")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig, data


def build_study_figure(study: StudyData):
    data = {"kind": "study", "axis": study.axis, "gap_floor": GAP_FLOOR,
            "grid": study.grid, "gap": study.gap}
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.plot(study.grid, study.gap, marker="o")
    ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABELS[study.axis])
    ax.set_ylabel("median final optimality gap")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig, data


def _write(fig, data: dict, out_path: str) -> None:
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    with open(out_path + ".data.json", "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def plot_convergence(csv_path: str, out_path: str) -> dict:
    """Render traces.csv to a raster image; returns the plotted data."""
    fig, data = build_convergence_figure(load_trace_table(csv_path))
    _write(fig, data, out_path)
    return data


def plot_study(json_path: str, out_path: str) -> dict:
    """Render study.json to a raster image; returns the plotted data."""
    fig, data = build_study_figure(load_study(json_path))
    _write(fig, data, out_path)
    return data
