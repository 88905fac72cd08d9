"""Kernel backend selection.

The compiled extension is used when it imports; setting
``ROTWALL_PURE_PYTHON=1`` forces the numpy fallback.
"""
import importlib
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("ROTWALL_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

observables = _impl.observables
alignment_trace = _impl.alignment_trace
rk4_bloch = _impl.rk4_bloch


def available_backends():
    names = ["python"]
    try:
        importlib.import_module("rotwall._ckernels")
        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("rotwall._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}")
