"""The fixed smooth bump used as test function everywhere."""

from __future__ import annotations

import math

import numpy as np

_PEAK = math.exp(-16.0 / 9.0)  # value at x = 5/4 before normalisation


def bump(x) -> np.ndarray:
    """W(x) = exp(-1/((x - 1/2)(2 - x))) on (1/2, 2), zero elsewhere, with max W = 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0.5) & (x < 2.0)
    xi = x[inside]
    out[inside] = np.exp(-1.0 / ((xi - 0.5) * (2.0 - xi))) / _PEAK
    return out


class SmoothWindow:
    """x -> bump(x / scale), supported on (scale/2, 2 scale)."""

    def __init__(self, scale: float = 1.0):
        self.scale = float(scale)

    def __call__(self, x) -> np.ndarray:
        return bump(np.asarray(x, dtype=float) / self.scale)

    def integer_support(self) -> np.ndarray:
        lo = int(math.floor(self.scale / 2)) + 1
        hi = int(math.ceil(2 * self.scale)) - 1
        return np.arange(max(lo, 1), hi + 1, dtype=np.int64)

    def __repr__(self) -> str:
        return f"SmoothWindow(scale={self.scale})"
