"""Kernel dispatch: the compiled extension when built, numpy otherwise.

Set ``FQGEOM_PURE=1`` to force the numpy backend.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _pykernels
from .field import inverse_table

try:
    if os.environ.get("FQGEOM_PURE"):
        raise ImportError("numpy backend forced")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

BACKEND = "cython" if _ckernels is not None else "python"


def _impl(backend: str | None) -> ModuleType:
    name = backend or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None


def sphere_convolve(mask: np.ndarray, offsets: np.ndarray, p: int, d: int,
                    backend: str | None = None) -> np.ndarray:
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    offsets = np.ascontiguousarray(np.asarray(offsets, dtype=np.int64).reshape(-1, d) % p)
    return _impl(backend).sphere_convolve(mask, offsets, p, d)


def classify_tuples(coords: np.ndarray, tuples: np.ndarray, p: int,
                    backend: str | None = None) -> np.ndarray:
    coords = np.ascontiguousarray(coords, dtype=np.int64)
    tuples = np.ascontiguousarray(tuples, dtype=np.int64)
    if tuples.ndim != 2:
        raise ValueError("tuples must be a 2-d index array")
    return _impl(backend).classify_tuples(coords, tuples, p, inverse_table(p))


def census_scan(coords: np.ndarray, p: int, k: int,
                backend: str | None = None) -> tuple[np.ndarray, int]:
    coords = np.ascontiguousarray(coords, dtype=np.int64)
    seen, degenerate = _impl(backend).census_scan(coords, p, k, inverse_table(p))
    return seen, int(degenerate)
