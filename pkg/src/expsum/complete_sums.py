"""Fourfold Kloosterman correlation sums and their reduction to two-variable sums.

Pole convention: any term of a sum in which some argument of u -> 1/u is
zero mod q is dropped.  This is applied uniformly below.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IdentityViolation, WorkBudgetExceeded, ZeroForm
from .ffq import build_context
from .kloosterman import KloostermanTable

DEFAULT_BUDGET = 10 ** 6
BRUTE_FORCE_MAX_Q = 61


@dataclass(frozen=True)
class Quadruple:
    b1: int
    b2: int
    b1p: int
    b2p: int

    def reduced(self, q: int) -> "Quadruple":
        return Quadruple(self.b1 % q, self.b2 % q, self.b1p % q, self.b2p % q)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.b1, self.b2, self.b1p, self.b2p)


@dataclass(frozen=True)
class ShiftParams:
    A: int
    B: int
    M: int


@dataclass
class SumScanReport:
    q: int
    family: str
    max_abs: float
    normalizer: float
    argmax: tuple
    count_scanned: int
    extra: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        return self.max_abs / self.normalizer

    def to_json(self) -> dict:
        b, h = self.argmax
        return {
            "q": self.q,
            "family": self.family,
            "max_abs": self.max_abs,
            "max_ratio": self.max_ratio,
            "argmax": {"b": list(b), "h": h},
            "scanned": self.count_scanned,
            **self.extra,
        }


def _quad(b) -> Quadruple:
    return b if isinstance(b, Quadruple) else Quadruple(*b)


_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def is_diagonal_typeI(b) -> bool:
    """Some two entries match, as a multiset, the two remaining entries.

    Besides (b1,b2) = (b1',b2') up to order this also catches b1 = b2 with
    b1' = b2', whose fourfold product is a square and never cancels.
    """
    t = _quad(b).as_tuple()
    return any(sorted((t[i], t[j])) == sorted((t[k], t[l])) for (i, j), (k, l) in _PAIRINGS)


def is_diagonal_typeII(b) -> bool:
    """An ordered pair (b_i, b_j), i != j, equals the pair on the complementary indices.

    Indices run over (b1, b2, b1', b2'); the complementary pair is taken in
    both orders, e.g. (b1, b2') = (b1', b2).
    """
    t = _quad(b).as_tuple()
    for i, j in itertools.permutations(range(4), 2):
        k, l = (x for x in range(4) if x not in (i, j))
        if (t[i], t[j]) in ((t[k], t[l]), (t[l], t[k])):
            return True
    return False


def family(B: int, exclude) -> list[Quadruple]:
    rng = range(B + 1, 2 * B + 1)
    return [Quadruple(*t) for t in itertools.product(rng, repeat=4) if not exclude(Quadruple(*t))]


def _product_rows(K: KloostermanTable, b: Quadruple) -> np.ndarray:
    """P[r, s] = K(s(r+b1)) K(s(r+b2)) K(s(r+b1')) K(s(r+b2')) for r, s mod q."""
    q = K.q.q
    r = np.arange(q, dtype=np.int64)[:, None]
    s = np.arange(q, dtype=np.int64)[None, :]
    out = np.ones((q, q))
    for c in b.as_tuple():
        out *= K.kl[(s * ((r + c) % q)) % q]
    return out


def sigma_incomplete(K: KloostermanTable, b, p: ShiftParams) -> complex:
    """Sum over r mod q and 1 <= s <= A*M of the fourfold product (K is real)."""
    b = _quad(b)
    q = K.q.q
    L = p.A * p.M
    total = 0.0
    s = np.arange(1, L + 1, dtype=np.int64)
    for r in range(q):
        prod = np.ones(L)
        for c in b.as_tuple():
            prod *= K.kl[(s * ((r + c) % q)) % q]
        total += prod.sum()
    return complex(total)


def sigma_complete_all_h(K: KloostermanTable, b) -> np.ndarray:
    """Vector over h of the completed sum, i.e. Sigma(K, b, h) for h = 0..q-1."""
    b = _quad(b).reduced(K.q.q)
    q = K.q.q
    col = _product_rows(K, b).sum(axis=0)  # indexed by s
    _, chars, _ = build_context(q)
    idx = np.multiply.outer(np.arange(q), np.arange(q)) % q
    return chars.values[idx] @ col


def sigma_complete(K: KloostermanTable, b, h: int) -> complex:
    b = _quad(b).reduced(K.q.q)
    q = K.q.q
    _, chars, _ = build_context(q)
    col = _product_rows(K, b).sum(axis=0)
    phase = chars.values[(h * np.arange(q)) % q]
    return complex(col @ phase)


def sigma1_closed_form(K: KloostermanTable) -> float:
    q = K.q.q
    return (q * q * K.kl[0] ** 4 - q * np.sum(K.kl ** 4)) / q


def sigma1_direct(q: int) -> complex:
    """Sum over u+v != u'+v' (poles dropped) of e_q(1/u + 1/v - 1/u' - 1/v'), divided by q.

    Uses T(w) = sum_{u+v=w} e_q(1/u + 1/v): the full sum is |sum_w T(w)|^2 and
    the excluded part is sum_w |T(w)|^2.
    """
    _, chars, inv = build_context(q)
    ph = chars.values[inv.inv]  # ph[u] = e_q(1/u), u >= 1
    T = np.zeros(q, dtype=complex)
    for u in range(1, q):
        v = np.arange(1, q)
        T[(u + v) % q] += ph[u] * ph[v]
    return (abs(T.sum()) ** 2 - np.sum(np.abs(T) ** 2)) / q


def sigma1_value(K: KloostermanTable, tol_factor: float = 1e-6) -> complex:
    q = K.q.q
    closed = sigma1_closed_form(K)
    direct = sigma1_direct(q)
    if abs(direct - closed) > tol_factor * q:
        raise IdentityViolation(f"sigma1 mismatch at q={q}: {direct} vs {closed}")
    return complex(closed)


def two_variable_sum(l3, l4, h: int, q: int) -> complex:
    """Sum over u, v of e_q(1/u + 1/v - 1/(l3(u,v)+h) - 1/(l4(u,v)-h)), poles dropped."""
    a, bb = l3[0] % q, l3[1] % q
    c, d = l4[0] % q, l4[1] % q
    if (a, bb) == (0, 0) or (c, d) == (0, 0):
        raise ZeroForm("linear forms must be non-zero")
    _, chars, inv = build_context(q)
    u = np.arange(1, q, dtype=np.int64)[:, None]
    v = np.arange(1, q, dtype=np.int64)[None, :]
    x3 = (a * u + bb * v + h) % q
    x4 = (c * u + d * v - h) % q
    ok = (x3 != 0) & (x4 != 0)
    k = (inv.inv[u] + inv.inv[v] - inv.inv[x3] - inv.inv[x4]) % q
    return complex(np.sum(chars.values[k] * ok))


def _solved_sum(c1: int, c2: int, den: int, h: int, q: int, swap: bool) -> complex:
    # u' = (c1 u + c2 v + h) / den, v' = u + v - u'
    _, chars, inv = build_context(q)
    dinv = pow(den, -1, q)
    u = np.arange(1, q, dtype=np.int64)[:, None]
    v = np.arange(1, q, dtype=np.int64)[None, :]
    up = ((c1 * u + c2 * v + h) % q) * dinv % q
    vp = (u + v - up) % q
    ok = (up != 0) & (vp != 0)
    k = (inv.inv[u] + inv.inv[v] - inv.inv[up] - inv.inv[vp]) % q
    val = complex(np.sum(chars.values[k] * ok))
    return val.conjugate() if swap else val


def _two_equation_brute(b: Quadruple, h: int, q: int) -> complex:
    _, chars, inv = build_context(q)
    total = 0j
    r = np.arange(1, q, dtype=np.int64)
    for u in range(1, q):
        for v in range(1, q):
            w = u + v
            # u' ranges over 1..q-1, v' = w - u'
            up = r
            vp = (w - up) % q
            ok = (vp != 0) & ((b.b1 * u + b.b2 * v - b.b1p * up - b.b2p * vp + h) % q == 0)
            k = (inv.inv[u] + inv.inv[v] - inv.inv[up] - inv.inv[vp]) % q
            total += np.sum(chars.values[k] * ok)
    return total


def two_equation_sum(b, h: int, q: int) -> complex:
    """S(f,h,b): sum over u+v = u'+v', b1 u + b2 v = b1' u' + b2' v' - h, of e_q(1/u+1/v-1/u'-1/v')."""
    b = _quad(b).reduced(q)
    h %= q
    if b.b1p != b.b2p:
        # solve for (u', v') given (u, v)
        return _solved_sum((b.b1 - b.b2p) % q, (b.b2 - b.b2p) % q, (b.b1p - b.b2p) % q, h, q, False)
    if b.b1 != b.b2:
        # b1 u + b2 v = b1' u' + b2' v' - h, read with (u', v') as the free pair:
        # u = ((b1' - b2) u' + (b2' - b2) v' - h) / (b1 - b2)
        return _solved_sum((b.b1p - b.b2) % q, (b.b2p - b.b2) % q, (b.b1 - b.b2) % q, (-h) % q, q, True)
    if q > BRUTE_FORCE_MAX_Q:
        raise WorkBudgetExceeded(f"degenerate quadruple needs O(q^3) enumeration; q={q} > {BRUTE_FORCE_MAX_Q}")
    return _two_equation_brute(b, h, q)


def scan_prop52(K: KloostermanTable, B: int, h_sample, budget: int = DEFAULT_BUDGET) -> SumScanReport:
    """Max of |Sigma(K,b,h)|/q over b in (B,2B]^4 off the type I diagonal and h in h_sample."""
    q = K.q.q
    if 16 * B ** 4 > budget:
        raise WorkBudgetExceeded(f"16 B^4 = {16 * B ** 4} exceeds budget {budget}")
    quads = family(B, is_diagonal_typeI)
    _, chars, _ = build_context(q)
    hs = [int(h) % q for h in h_sample]
    s = np.arange(q)
    phases = np.stack([chars.values[(h * s) % q] for h in hs])
    best, arg = -1.0, None
    for b in quads:
        col = _product_rows(K, b.reduced(q)).sum(axis=0)
        vals = np.abs(phases @ col)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, arg = float(vals[i]), (b.as_tuple(), hs[i])
    return SumScanReport(q, f"(B,2B]^4 minus type I diagonal, B={B}, h={hs}", best, float(q), arg, len(quads) * len(hs))
