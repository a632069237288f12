"""Rolling and sliding contact integration on triangle meshes."""

from ._rollslide import *  # noqa: F401,F403
from ._rollslide import RollslideError  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
