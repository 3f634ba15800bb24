"""Publication-style figures from cavitysr CSV files.

This package talks to the solver package only through its CSV contract;
it never imports it.
"""

from .csvio import SchemaError, Table, read_table
from .plots import PlotSpec, load_style, plot_dynamics, plot_risetime

__version__ = "0.1.0"
