"""twistfig: static figures from spin-squeezing CSV/JSON output files.

Strictly a presentation layer: every number on a figure comes from an input
file, nothing is recomputed.
"""

__version__ = "0.1.0"

from .render import FigureSpec, InputError, render

__all__ = ["FigureSpec", "InputError", "render", "__version__"]
