# -*- coding: utf-8 -*-
from importlib.metadata import PackageNotFoundError, version

try:
    # Change here if project is renamed and does not equal the package name
    dist_name = "KeyLeasing"
    __version__ = version(dist_name)
except PackageNotFoundError:
    __version__ = "unknown"
finally:
    del version, PackageNotFoundError

from .bits import Bits
from .config import RunConfig, SchemeParams
from .games import run_game
from .qreg import SparseState
from .schemes import make_scheme

__all__ = [
    "Bits",
    "RunConfig",
    "SchemeParams",
    "SparseState",
    "make_scheme",
    "run_game",
]
