"""Numerical delocalization toolkit for eigenfunctions on regular graphs.

The package works with (d+1)-regular graphs and the normalised adjacency
T_d = A / sqrt(d).  Hot loops run in a compiled extension when it is
built; ``BACKEND`` reports which implementation was loaded.
"""
from ._accel import BACKEND
from .delocalization import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .graph_core import *  # noqa: F401,F403
from .graph_operators import *  # noqa: F401,F403
from .kernel_builder import *  # noqa: F401,F403
from .reporting import RunConfig, canonical_json, run  # noqa: F401
from .tree_harmonics import *  # noqa: F401,F403

__version__ = "0.1.0"
