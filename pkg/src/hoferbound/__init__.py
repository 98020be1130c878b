"""Lower bounds on Hofer distances via boundary depth of filtered Floer complexes."""

from .errors import *  # noqa: F401,F403
from .kernels import BACKEND

__version__ = "0.1.0"
