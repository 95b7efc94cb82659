"""Backend selection for the attention kernels.

The compiled extension (``longdiff._native``) is preferred when it imported
cleanly; otherwise the pure-numpy fallback is used.  ``LONGDIFF_BACKEND``
("native" or "python") forces the choice, and ``select()`` switches it at
runtime (used by tests and the benchmark).
"""
from __future__ import annotations

import os

from . import pyref

_ALIASES = {"py": "python", "numpy": "python", "c": "native", "cython": "native"}

_backends = {"python": pyref}
try:
    from longdiff import _native

    _backends["native"] = _native
except ImportError:
    _native = None


def available_backends() -> dict:
    return dict(_backends)


def select(name: str):
    """Make ``name`` the active backend and return it."""
    global _active, _active_name
    key = _ALIASES.get(name.strip().lower(), name.strip().lower())
    if key not in _backends:
        have = ", ".join(sorted(_backends))
        raise RuntimeError(f"unknown or unavailable backend {name!r} (have: {have})")
    _active_name = key
    _active = _backends[key]
    return _active


def active():
    return _active


def backend_name() -> str:
    return _active_name


_env = os.environ.get("LONGDIFF_BACKEND", "").strip()
if _env:
    select(_env)
else:
    _active_name = "native" if "native" in _backends else "python"
    _active = _backends[_active_name]
