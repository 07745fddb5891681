"""Map-assisted mmWave positioning from per-path angle of arrival and time of flight."""

from ._core import *  # noqa: F401,F403
from ._core import gpp  # noqa: F401

__version__ = "0.1.0"
