"""Bit-string kernels used by the model scans and the bounded checker.

Each kernel has a numba ``@njit`` version and a pure-numpy version with the same
contract.  ``MINSKY_PRESBURGER_BACKEND=numpy`` forces the numpy path; otherwise
numba is used when it imports.  ``use_backend`` switches at runtime (tests and
the benchmark compare both).
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

BACKEND_ENV = "MINSKY_PRESBURGER_BACKEND"


# ---------------------------------------------------------------------------
# numpy


def _np_pattern_mask(bits: np.ndarray, pattern: np.ndarray) -> np.ndarray:
    n = bits.size - pattern.size + 1
    if n <= 0:
        return np.zeros(0, dtype=np.bool_)
    mask = np.ones(n, dtype=np.bool_)
    for k in range(pattern.size):
        mask &= bits[k : k + n] == pattern[k]
    return mask


def _np_gather(bits: np.ndarray, idx: np.ndarray, bound: int) -> tuple[np.ndarray, int]:
    if idx.size == 0:
        return np.zeros(0, dtype=np.uint8), -1
    over = idx >= bound
    if over.any():
        return np.zeros(0, dtype=np.uint8), int(np.argmax(over))
    inside = idx < bits.size
    if inside.all():
        return bits[idx], -1
    out = np.zeros(idx.size, dtype=np.uint8)
    out[inside] = bits[idx[inside]]
    return out, -1


def _np_count_in_ranges(mask: np.ndarray, starts: np.ndarray, stops: np.ndarray) -> np.ndarray:
    csum = np.concatenate(([0], np.cumsum(mask, dtype=np.int64)))
    stops = np.minimum(stops, mask.size)
    starts = np.minimum(starts, stops)
    return csum[stops] - csum[starts]


# ---------------------------------------------------------------------------
# numba

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_pattern_mask(bits, pattern):
        n = bits.size - pattern.size + 1
        if n <= 0:
            return np.zeros(0, dtype=np.bool_)
        mask = np.empty(n, dtype=np.bool_)
        m = pattern.size
        for i in range(n):
            ok = True
            for k in range(m):
                if bits[i + k] != pattern[k]:
                    ok = False
                    break
            mask[i] = ok
        return mask

    @njit(cache=True)
    def _nb_gather(bits, idx, bound):
        out = np.zeros(idx.size, dtype=np.uint8)
        n = bits.size
        for i in range(idx.size):
            j = idx[i]
            if j >= bound:
                return np.zeros(0, dtype=np.uint8), i
            if j < n:
                out[i] = bits[j]
        return out, -1

    @njit(cache=True)
    def _nb_count_in_ranges(mask, starts, stops):
        out = np.zeros(starts.size, dtype=np.int64)
        for r in range(starts.size):
            hi = min(stops[r], mask.size)
            c = 0
            for i in range(starts[r], hi):
                if mask[i]:
                    c += 1
            out[r] = c
        return out


_BACKENDS = {
    "numpy": (_np_pattern_mask, _np_gather, _np_count_in_ranges),
}
if HAVE_NUMBA:
    _BACKENDS["numba"] = (_nb_pattern_mask, _nb_gather, _nb_count_in_ranges)

_active = "numpy"
_impl = _BACKENDS["numpy"]


def use_backend(name: str) -> None:
    global _active, _impl
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(_BACKENDS)}")
    _active = name
    _impl = _BACKENDS[name]


def backend() -> str:
    return _active


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


use_backend(os.environ.get(BACKEND_ENV, "numba" if HAVE_NUMBA else "numpy").strip().lower())


# ---------------------------------------------------------------------------
# public contracts


def pattern_mask(bits: np.ndarray, pattern) -> np.ndarray:
    """``mask[i]`` is true iff ``bits[i : i + len(pattern)] == pattern``."""
    pat = np.asarray(pattern, dtype=np.uint8)
    return _impl[0](np.ascontiguousarray(bits, dtype=np.uint8), pat)


def gather(bits: np.ndarray, idx: np.ndarray, bound: int) -> tuple[np.ndarray, int]:
    """Read ``bits[idx]``; positions in ``[len(bits), bound)`` read as 0.

    Returns ``(values, -1)``, or ``(empty, i)`` where ``idx[i]`` is the first
    position ``>= bound``.
    """
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    return _impl[1](bits, idx, np.int64(bound))


def count_in_ranges(mask: np.ndarray, starts, stops) -> np.ndarray:
    """Number of true entries of ``mask`` in each half-open range ``[start, stop)``."""
    return _impl[2](
        np.ascontiguousarray(mask, dtype=np.bool_),
        np.asarray(starts, dtype=np.int64),
        np.asarray(stops, dtype=np.int64),
    )
