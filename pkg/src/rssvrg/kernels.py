"""Backend selection for the hinge inner-loop engine.

Two interchangeable engines exist: a compiled Cython kernel and a numpy
fallback. Import-time selection prefers the compiled one; the environment
variable RSSVRG_BACKEND ({auto, cython, numpy}) overrides, and `cython`
fails loudly when the extension is not built rather than silently
downgrading.
"""

import os

from . import _hinge_numpy
from .errors import ConfigurationError

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

ENV_VAR = "RSSVRG_BACKEND"


def available_backends():
    names = ["numpy"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_engine(name=None):
    """Engine module for `name`, or the environment/default selection."""
    if name is None:
        name = os.environ.get(ENV_VAR, "auto")
    if name == "auto":
        return _compiled if _compiled is not None else _hinge_numpy
    if name == "numpy":
        return _hinge_numpy
    if name == "cython":
        if _compiled is None:
            raise ConfigurationError(
                "RSSVRG_BACKEND=cython but the compiled kernel is not built")
        return _compiled
    raise ConfigurationError(f"unknown backend {name!r}")


def backend_name():
    return get_engine().NAME
