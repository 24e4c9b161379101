"""Cutoffed Euler-Maruyama schemes driven by isotropic alpha-stable noise.

Thin wrapper around the compiled _sdelab extension.  In an installed wheel
the extension sits next to this file; in a source checkout point
SDELAB_MODULE_DIR at the build directory containing _sdelab*.so.
"""

import os
import sys


def _load():
    try:
        from . import _sdelab  # installed layout
        return _sdelab
    except ImportError:
        pass
    module_dir = os.environ.get("SDELAB_MODULE_DIR")
    if not module_dir:
        raise ImportError(
            "compiled module _sdelab not found; install the package or set "
            "SDELAB_MODULE_DIR to the CMake build directory"
        )
    sys.path.insert(0, module_dir)
    try:
        import _sdelab
    finally:
        sys.path.pop(0)
    return _sdelab


_impl = _load()

globals().update(
    {name: getattr(_impl, name) for name in dir(_impl) if not name.startswith("__")}
)
__version__ = _impl.__version__
del os, sys, _load
