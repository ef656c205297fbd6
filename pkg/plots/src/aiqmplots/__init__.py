"""Vector-figure rendering for the driven-spin metrology simulator's tables."""

from .csvio import PlotDataError, Table, read_table
from .figures import FigureSpec, PanelSpec, SeriesSpec, load_figure_spec, render
from .presets import husimi_figure_spec, preset_figure_spec

__version__ = "0.1.0"
__all__ = ["PlotDataError", "Table", "read_table", "FigureSpec", "PanelSpec",
           "SeriesSpec", "load_figure_spec", "render", "preset_figure_spec",
           "husimi_figure_spec"]
