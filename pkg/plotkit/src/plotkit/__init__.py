"""Figures from solver output files: deviation curves, field plots,
convergence tables. Consumes only the ledger CSV, study CSV and legacy
ASCII VTK formats written by the rdeuler command line."""

from .readers import InputError, Snapshot, read_ledger, read_study, read_vtk
from .figures import (FigureSpec, PLOT_FLOOR, plot_convergence,
                      plot_deviation, plot_field, render)

__all__ = [
    "InputError", "Snapshot", "read_ledger", "read_study", "read_vtk",
    "FigureSpec", "PLOT_FLOOR", "plot_convergence", "plot_deviation",
    "plot_field", "render",
]
