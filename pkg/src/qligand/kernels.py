"""Kernel backend selection: compiled extension when importable, numpy otherwise."""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

DEFAULT_BACKEND = "cython" if _ckernels is not None else "python"
_active = BACKENDS[DEFAULT_BACKEND]


def get_backend():
    return _active


def backend_name() -> str:
    return next(name for name, mod in BACKENDS.items() if mod is _active)


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    _active = BACKENDS[name]
