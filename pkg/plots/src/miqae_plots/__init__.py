"""Static figure rendering from the estimation harness's CSV exports.

Consumes only the documented CSV schemas (aggregate, per-k, per-round
tables); never re-runs estimations. Rendering is a pure function of the
input files, so repeated invocations produce byte-identical images.
"""

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render

__all__ = ["FIGURE_KINDS", "FigureSpec", "SchemaError", "render"]
__version__ = "0.1.0"
