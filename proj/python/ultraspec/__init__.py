"""Ultraspherical spectral method for linear ODE boundary value problems on [-1,1]."""

from ._ultraspec import *  # noqa: F401,F403
from ._ultraspec import __doc__  # noqa: F401

__version__ = "0.1.0"
