"""Figure generation for zkcyl run directories via their file formats."""

from .figures import FIGURE_KINDS, PlotSpec, render
from .runformat import SchemaError, read_series, read_snapshot, select_snapshot

__version__ = "0.1.0"
