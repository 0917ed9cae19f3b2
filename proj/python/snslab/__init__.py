"""Spectral vorticity laboratory: thin wrapper over the native core."""

from snslab._core import *  # noqa: F401,F403
from snslab._core import __doc__  # noqa: F401
