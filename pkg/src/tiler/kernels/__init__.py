"""Random-walk kernel backends.

Two interchangeable implementations: a numba-compiled scalar backend
and a vectorized pure-numpy backend.  Selection order: an explicit
`use_backend()` call, then the TILER_KERNELS environment variable
("numba" or "numpy"), then numba when importable, else numpy.

Both backends consume identical per-trial random streams and keep all
accumulators in integers, so their outputs are bit-identical.
"""
from __future__ import annotations

import os

ALT_CAP = 32

_forced: str | None = None
_numba_ok: bool | None = None


def _numba_available() -> bool:
    global _numba_ok
    if _numba_ok is None:
        try:
            import numba  # noqa: F401
            _numba_ok = True
        except Exception:
            _numba_ok = False
    return _numba_ok


def use_backend(name: str | None) -> None:
    """Force a backend ("numba" / "numpy") or reset to automatic with None."""
    global _forced
    if name not in (None, "numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name == "numba" and not _numba_available():
        raise RuntimeError("numba backend requested but numba is unavailable")
    _forced = name


def backend_name() -> str:
    if _forced is not None:
        return _forced
    env = os.environ.get("TILER_KERNELS", "").strip().lower()
    if env in ("numba", "numpy"):
        if env == "numba" and not _numba_available():
            raise RuntimeError("TILER_KERNELS=numba but numba is unavailable")
        return env
    if env:
        raise RuntimeError(f"unknown TILER_KERNELS value {env!r}")
    return "numba" if _numba_available() else "numpy"


def get_backend():
    if backend_name() == "numba":
        from . import _numba
        return _numba
    from . import _numpy
    return _numpy
