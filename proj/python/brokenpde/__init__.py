"""Python interface to the brokenpde solver and diagnostics."""

from ._brokenpde import *  # noqa: F401,F403
from ._brokenpde import __version__  # noqa: F401
