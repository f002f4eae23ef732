"""Selects the compiled kernels when available, the pure-Python ones otherwise.

Set ``BORCHERDS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
mul_trunc = _pykernels.mul_trunc
exp_graded = _pykernels.exp_graded

if not os.environ.get("BORCHERDS_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        mul_trunc = _ckernels.mul_trunc
        exp_graded = _ckernels.exp_graded


def get_backend(name=None):
    """Return a (mul_trunc, exp_graded) pair for ``name`` in {"python", "cython"}."""
    if name is None:
        return mul_trunc, exp_graded
    if name == "python":
        return _pykernels.mul_trunc, _pykernels.exp_graded
    if name == "cython":
        from . import _ckernels
        return _ckernels.mul_trunc, _ckernels.exp_graded
    raise ValueError("unknown backend %r" % name)
