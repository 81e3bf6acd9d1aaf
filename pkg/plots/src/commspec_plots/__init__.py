"""Figures for commutator spectrum CSVs: histogram/density overlays and
observed-vs-theoretical shrinkage scatters.

Inputs are the eigenvalue CSV (header ``lambda``) and density CSV
(``# point_mass_zero=`` comment, then ``x,f`` rows) written by the
commspec command line; nothing here imports that package.
"""

from .overlay import FigureSpec, render_overlay
from .shrinkage import render_shrinkage

__version__ = "0.1.0"
