"""Publication-style figures from scramble CSV outputs.

This package never recomputes physics: every number drawn comes from an
input CSV, except the analytic critical markers (1-gamma)/2 and 1-gamma
passed in through the plot spec.
"""

__version__ = "0.1.0"

from .render import PlotSpec, analytic_markers, render_phase_diagram, render_slices
