"""Active learning for multi-instance multi-label data with incomplete labels."""

from ._core import *  # noqa: F401,F403
from ._core import ValidationError, Dataset  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
