"""Kloosterman sums modulo a prime."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BoundViolation
from .ffq import as_modulus, build_context, dft_mod_q, PrimeModulus

WEIL_SLACK = 1e-9
REALNESS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class KloostermanTable:
    q: PrimeModulus
    kl: np.ndarray  # kl[a] = S(a,1;q)/sqrt(q)
    max_imag: float = 0.0

    def __call__(self, a) -> np.ndarray:
        return self.kl[np.asarray(a) % self.q.q]


def kloosterman_raw(a: int, b: int, q) -> complex:
    """S(a,b;q) by direct summation over d = 1..q-1."""
    pm, chars, inv = build_context(int(q))
    d = np.arange(1, pm.q, dtype=np.int64)
    k = (a * d + b * inv.inv[1:]) % pm.q
    return complex(chars.values[k].sum())


@lru_cache(maxsize=32)
def build_table(q) -> KloostermanTable:
    pm, chars, inv = build_context(int(q))
    x = chars.values[inv.inv].copy()
    x[0] = 0.0
    raw = dft_mod_q(x, pm.q)
    max_imag = float(np.max(np.abs(raw.imag))) / math.sqrt(pm.q)
    if max_imag > REALNESS_TOL:
        raise BoundViolation(f"Kloosterman sums mod {pm.q} not real: {max_imag:.3e}")
    kl = raw.real / math.sqrt(pm.q)
    kl.setflags(write=False)
    return KloostermanTable(pm, kl, max_imag)


def verify_weil(q) -> tuple[float, int]:
    """Return (max |Kl(a;q)|, argmax a) over 1 <= a < q, raising if above 2."""
    K = build_table(int(as_modulus(q).q))
    vals = np.abs(K.kl[1:])
    i = int(np.argmax(vals))
    m = float(vals[i])
    if m > 2.0 + WEIL_SLACK:
        raise BoundViolation(f"|Kl({i + 1};{K.q.q})| = {m} exceeds 2")
    return m, i + 1


def parseval_sum(K: KloostermanTable) -> float:
    return float(np.sum(K.kl ** 2))
