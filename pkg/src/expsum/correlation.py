"""Correlation sums of fourfold Kloosterman products twisted by additive characters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complete_sums import Quadruple, SumScanReport, _product_rows, _quad, family, is_diagonal_typeII
from .errors import WorkBudgetExceeded
from .ffq import build_context, dft_rows
from .kloosterman import KloostermanTable

FULL_PAIR_SCAN_MAX_Q = 256
SAMPLE_PAIRS = 10 ** 4
SAMPLE_SEED = 20240601
MATRIX_MAX_Q = 2048


@dataclass(eq=False)
class CorrelationContext:
    q: int
    K: KloostermanTable
    b: Quadruple
    S_matrix: np.ndarray  # S_matrix[r, lam]
    _R: np.ndarray | None = None
    _avg: np.ndarray | None = None

    def S(self, r: int, lam: int) -> complex:
        return complex(self.S_matrix[r % self.q, lam % self.q])

    @property
    def R(self) -> np.ndarray:
        """R[mu1, mu2] = sum_r S(r, mu1) conj(S(r, mu2))."""
        if self._R is None:
            self._R = self.S_matrix.T @ np.conj(self.S_matrix)
        return self._R

    @property
    def shift_average(self) -> np.ndarray:
        """avg[d] = (1/q) sum_lam R(lam + d, lam), which is what big_sigma subtracts."""
        if self._avg is None:
            q = self.q
            lam = np.arange(q)
            R = self.R
            self._avg = np.array([R[(lam + d) % q, lam].sum() for d in range(q)]) / q
        return self._avg

    def sigma_matrix(self) -> np.ndarray:
        q = self.q
        d = np.subtract.outer(np.arange(q), np.arange(q)) % q
        return self.R - self.shift_average[d]


def build_context_for(K: KloostermanTable, b) -> CorrelationContext:
    q = K.q.q
    if q > MATRIX_MAX_Q:
        raise WorkBudgetExceeded(f"S matrix for q={q} exceeds the {MATRIX_MAX_Q} cap")
    b = _quad(b).reduced(q)
    P = _product_rows(K, b)
    return CorrelationContext(q, K, b, dft_rows(P, q))


def script_S_direct(K: KloostermanTable, b, r: int, lam: int) -> complex:
    q = K.q.q
    b = _quad(b).reduced(q)
    _, chars, _ = build_context(q)
    total = 0j
    for s in range(q):
        p = 1.0
        for c in b.as_tuple():
            p *= K.kl[s * (r + c) % q]
        total += p * chars.values[lam * s % q]
    return total


def script_R(ctx: CorrelationContext, mu1: int, mu2: int) -> complex:
    q = ctx.q
    return complex(np.sum(ctx.S_matrix[:, mu1 % q] * np.conj(ctx.S_matrix[:, mu2 % q])))


def big_sigma(ctx: CorrelationContext, mu1: int, mu2: int) -> complex:
    q = ctx.q
    return complex(ctx.R[mu1 % q, mu2 % q] - ctx.shift_average[(mu1 - mu2) % q])


def _pairs(q: int) -> tuple[np.ndarray, np.ndarray] | None:
    if q <= FULL_PAIR_SCAN_MAX_Q:
        return None
    rng = np.random.default_rng(SAMPLE_SEED)
    return rng.integers(0, q, SAMPLE_PAIRS), rng.integers(0, q, SAMPLE_PAIRS)


def scan_conjecture(K: KloostermanTable, B: int, budget: int = 10 ** 9) -> SumScanReport:
    """Max of |Sigma(b, mu1, mu2)|/q^{3/2} over b in (B,2B]^4 off the type II diagonal."""
    q = K.q.q
    quads = family(B, is_diagonal_typeII)
    pairs = _pairs(q)
    npairs = q * q if pairs is None else SAMPLE_PAIRS
    work = len(quads) * q ** 3
    if work > budget:
        raise WorkBudgetExceeded(f"estimated work {work} exceeds budget {budget}")
    best, arg = -1.0, None
    best_off = -1.0  # diagnostic: mu = (0, 0) left out
    hist = np.zeros(12, dtype=np.int64)
    edges = np.linspace(0.0, 3.0, 13)
    norm = q ** 1.5
    for b in quads:
        sig = np.abs(build_context_for(K, b).sigma_matrix())
        if pairs is not None:
            sig = sig[pairs[0], pairs[1]]
            idx = int(np.argmax(sig))
            mu = (int(pairs[0][idx]), int(pairs[1][idx]))
            val = float(sig[idx])
        else:
            idx = np.unravel_index(int(np.argmax(sig)), sig.shape)
            mu = (int(idx[0]), int(idx[1]))
            val = float(sig[idx])
        if pairs is None:
            s00 = sig[0, 0]
            sig[0, 0] = -1.0
            best_off = max(best_off, float(sig.max()))
            sig[0, 0] = s00
        else:
            off = ~((pairs[0] == 0) & (pairs[1] == 0))
            best_off = max(best_off, float(sig[off].max()))
        hist += np.histogram(np.clip(sig.ravel() / norm, 0, 3.0 - 1e-12), bins=edges)[0]
        if val > best:
            best, arg = val, (b.as_tuple(), mu)
    rep = SumScanReport(q, f"(B,2B]^4 minus type II diagonal, B={B}", best, norm, arg, len(quads) * npairs)
    rep.extra["max_ratio_mu_nonzero"] = best_off / norm
    rep.extra["ratio_histogram"] = {"edges": edges.tolist(), "counts": hist.tolist()}
    return rep
