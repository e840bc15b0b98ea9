"""Figures from the solver benchmark's file artifacts.

Reads the harness's traces.csv and study.json and writes raster charts:
optimality gap vs epoch per solver, and gap vs sweep value. Coupled to
the harness only through those file formats.
"""

from .inputs import (GAP_FLOOR, PlotInputError, StudyData, TraceTable,
                     load_study, load_trace_table)
from .figures import plot_convergence, plot_study

__all__ = [
    "GAP_FLOOR",
    "PlotInputError",
    "StudyData",
    "TraceTable",
    "load_study",
    "load_trace_table",
    "plot_convergence",
    "plot_study",
]
