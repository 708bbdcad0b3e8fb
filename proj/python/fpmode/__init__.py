"""Modally resolved Fabry-Perot simulation and Fourier analysis.

Thin python layer over the compiled _core module; everything public lives
there.
"""

from fpmode._core import *  # noqa: F401,F403
from fpmode._core import __version__  # noqa: F401
