"""Temporal analysis of maternal SpO2 desaturations and fetal heart rate.

Thin Python surface over the C++ core; see the project README for the file
formats and the CLI.
"""

from fetalink._core import *  # noqa: F401,F403
from fetalink._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
