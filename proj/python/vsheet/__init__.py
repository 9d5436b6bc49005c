"""Vortex sheet measures: spirals, energies, concentration bounds and Birkhoff-Rott evolution."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_cli  # noqa: F401
