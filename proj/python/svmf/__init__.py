"""Substructure visual molecular fingerprinting engine."""

from svmf._core import *  # noqa: F401,F403
from svmf._core import __version__  # noqa: F401
