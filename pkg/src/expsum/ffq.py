"""Prime-field arithmetic, additive characters and prime-length DFTs."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CompositeModulus, EvenModulus, LengthMismatch

# Deterministic for every n < 3.3e24, which covers 64-bit inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

DIRECT_DFT_MAX = 512


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


@dataclass(frozen=True)
class PrimeModulus:
    q: int

    def __post_init__(self):
        if self.q == 2:
            raise EvenModulus("q = 2 is not supported; an odd prime is required")
        if self.q < 3 or not is_prime(self.q):
            raise CompositeModulus(f"{self.q} is not prime")

    def __int__(self) -> int:
        return self.q


@dataclass(frozen=True, eq=False)
class AdditiveCharTable:
    q: PrimeModulus
    values: np.ndarray  # values[k] = e(k/q)


@dataclass(frozen=True, eq=False)
class InverseTable:
    q: PrimeModulus
    inv: np.ndarray  # inv[0] = 0 is a placeholder


def as_modulus(q) -> PrimeModulus:
    return q if isinstance(q, PrimeModulus) else PrimeModulus(int(q))


def unit_roots(n: int, k: np.ndarray | None = None) -> np.ndarray:
    """e(k/n) for integer k, with the angle reduced exactly before the trig call."""
    if k is None:
        k = np.arange(n, dtype=np.int64)
    ang = 2.0 * np.pi * (np.asarray(k, dtype=np.int64) % n) / n
    out = np.cos(ang) + 1j * np.sin(ang)
    return out


def inverses(q: int) -> np.ndarray:
    inv = np.zeros(q, dtype=np.int64)
    if q > 1:
        inv[1] = 1
    for i in range(2, q):
        inv[i] = (-(q // i) * inv[q % i]) % q
    return inv


@lru_cache(maxsize=64)
def build_context(q: int) -> tuple[PrimeModulus, AdditiveCharTable, InverseTable]:
    pm = as_modulus(q)
    chars = unit_roots(pm.q)
    chars[0] = 1.0
    chars.setflags(write=False)
    inv = inverses(pm.q)
    inv.setflags(write=False)
    return pm, AdditiveCharTable(pm, chars), InverseTable(pm, inv)


def _dft_direct(x: np.ndarray, q: int) -> np.ndarray:
    idx = np.multiply.outer(np.arange(q), np.arange(q)) % q
    return unit_roots(q, idx) @ x


def _dft_bluestein(x: np.ndarray, q: int) -> np.ndarray:
    # a*d = (a^2 + d^2 - (a-d)^2) / 2, phases taken modulo 2q
    k = np.arange(q, dtype=np.int64)
    w = unit_roots(2 * q, (k * k) % (2 * q))
    n = 1
    while n < 2 * q - 1:
        n *= 2
    a = np.zeros(n, dtype=complex)
    a[:q] = x * w
    b = np.zeros(n, dtype=complex)
    b[:q] = np.conj(w)
    b[n - q + 1:] = np.conj(w[1:])[::-1]
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    return w * conv[:q]


def dft_mod_q(x, q) -> np.ndarray:
    """out[a] = sum_d x[d] e(a d / q) for a prime q."""
    qq = int(q)
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] != qq:
        raise LengthMismatch(f"expected length {qq}, got {x.shape}")
    if qq <= DIRECT_DFT_MAX:
        return _dft_direct(x, qq)
    return _dft_bluestein(x, qq)


def dft_rows(x: np.ndarray, q: int) -> np.ndarray:
    """Row-wise version of dft_mod_q for a (rows, q) array."""
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != q:
        raise LengthMismatch(f"expected trailing length {q}, got {x.shape}")
    # numpy's FFT uses e(-ad/q); conjugate the kernel by index reversal.
    f = np.fft.fft(x, axis=-1)
    return np.concatenate([f[..., :1], f[..., :0:-1]], axis=-1)


def primitive_root(q: int) -> int:
    """Smallest generator of (Z/qZ)^*, found by trial."""
    n = q - 1
    factors = []
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            factors.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        factors.append(m)
    for g in range(2, q):
        if all(pow(g, n // f, q) != 1 for f in factors):
            return g
    return 1  # q = 2 only


@lru_cache(maxsize=64)
def dlog_table(q: int) -> tuple[int, np.ndarray, np.ndarray]:
    """(g, dlog, powers) with powers[k] = g^k and dlog[powers[k]] = k; dlog[0] = -1."""
    g = primitive_root(q)
    powers = np.empty(q - 1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        powers[k] = x
        x = x * g % q
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[powers] = np.arange(q - 1)
    powers.setflags(write=False)
    dlog.setflags(write=False)
    return g, dlog, powers
