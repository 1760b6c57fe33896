"""Online sampling in controller parameter space for vehicle motion planning."""

from paraplan._core import *  # noqa: F401,F403
from paraplan._core import __doc__  # noqa: F401

__version__ = "0.1.0"
