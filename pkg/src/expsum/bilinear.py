"""Bilinear and trilinear sums: Kloosterman bilinear forms, congruence sums, and bound shapes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import NotCoprime, PreconditionViolated
from .ffq import dlog_table
from .kloosterman import KloostermanTable, build_table
from .window import bump

THETA = 7 / 64
DIRECT_MAX_WORK = 10 ** 7
BOUND_NAMES = ("trivial", "typeII_5_1_1", "typeI_5_1_2", "smooth_5_1_3", "conj_5_4",
               "shifted_3_2", "trivial_3_1", "young_4_1a", "young_4_1b")
_ALIASES = {"typeII": "typeII_5_1_1", "typeI": "typeI_5_1_2", "smooth": "smooth_5_1_3",
            "conj": "conj_5_4", "shifted": "shifted_3_2", "young_a": "young_4_1a", "young_b": "young_4_1b"}


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    support_start: int
    values: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        if self.support_start < 1:
            raise ValueError("support_start must be >= 1")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.support_start, self.support_start + len(self.values), dtype=np.int64)

    @cached_property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)))

    @cached_property
    def l2(self) -> float:
        return float(math.sqrt(np.sum(np.abs(self.values) ** 2)))

    def __len__(self) -> int:
        return len(self.values)


def coefficients(mode: str, length: int, start: int = 1) -> CoefficientVector:
    """ones | rademacher:SEED | divisor | tau, on start..start+length-1."""
    n = np.arange(start, start + length)
    if mode == "ones":
        vals = np.ones(length)
    elif mode.startswith("rademacher"):
        _, _, seed = mode.partition(":")
        rng = np.random.default_rng(int(seed or 0))
        vals = rng.choice([-1.0, 1.0], size=length)
    elif mode == "divisor":
        from .modforms import divisor_counts
        vals = divisor_counts(int(n[-1]))[n].astype(float)
    elif mode == "tau":
        from .modforms import hecke_coefficients
        vals = hecke_coefficients("tau", int(n[-1]))[n]
    else:
        raise ValueError(f"unknown coefficient family {mode!r}")
    return CoefficientVector(start, np.asarray(vals, dtype=float), mode)


@dataclass(frozen=True)
class RangeSpec:
    q: int
    M: int
    N: int

    @property
    def Mstar(self) -> Fraction:
        return Fraction(self.q * self.q, self.M)

    @property
    def Nstar(self) -> Fraction:
        return Fraction(self.q * self.q, self.N)

    @property
    def mu(self) -> float:
        return math.log(self.M) / math.log(self.q)

    @property
    def nu(self) -> float:
        return math.log(self.N) / math.log(self.q)


@dataclass
class BoundReport:
    bound_name: str
    lhs_abs: float
    rhs_shape: float
    params: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.lhs_abs / self.rhs_shape

    def to_json(self) -> dict:
        return {"bound": self.bound_name, "lhs_abs": self.lhs_abs, "rhs_shape": self.rhs_shape,
                "ratio": self.ratio, **self.params}


# ---------------------------------------------------------------- Kloosterman bilinear forms

def _direct(K: KloostermanTable, a: int, alpha: CoefficientVector, beta: CoefficientVector) -> complex:
    q = K.q.q
    m = alpha.indices % q
    n = beta.indices % q
    av = np.asarray(alpha.values, dtype=complex)
    bv = np.asarray(beta.values, dtype=complex)
    # fsum over the same multiset of commutative products: symmetric in (alpha, beta) bit for bit
    rows = max(1, 2 ** 20 // max(1, len(n)))
    re_parts, im_parts = [], []
    for i in range(0, len(m), rows):
        idx = (a * np.multiply.outer(m[i:i + rows], n)) % q
        p = np.multiply.outer(av[i:i + rows], bv) * K.kl[idx]
        re_parts.append(p.real.ravel())
        im_parts.append(p.imag.ravel())
    re = math.fsum(itertools.chain.from_iterable(re_parts))
    im = math.fsum(itertools.chain.from_iterable(im_parts))
    return complex(re, im)


def _class_sums(v: CoefficientVector, q: int) -> np.ndarray:
    vals = np.asarray(v.values, dtype=complex)
    r = v.indices % q
    return np.bincount(r, weights=vals.real, minlength=q) + 1j * np.bincount(r, weights=vals.imag, minlength=q)


def product_classes(alpha: CoefficientVector, beta: CoefficientVector, q: int) -> np.ndarray:
    """c[t] = sum over mn = t mod q of alpha_m beta_n, by cyclic convolution in discrete-log order."""
    A = _class_sums(alpha, q)
    B = _class_sums(beta, q)
    _, dlog, powers = dlog_table(q)
    fa = np.fft.fft(A[powers])
    fb = np.fft.fft(B[powers])
    conv = np.fft.ifft(fa * fb)
    c = np.zeros(q, dtype=complex)
    c[powers] = conv
    # t = 0: one of the factors is divisible by q
    An = A[1:].sum()
    Bn = B[1:].sum()
    c[0] = A[0] * B[0] + (A[0] * Bn + An * B[0])
    return c


def _convolution(K: KloostermanTable, a: int, alpha: CoefficientVector, beta: CoefficientVector) -> complex:
    q = K.q.q
    c = product_classes(alpha, beta, q)
    t = np.arange(q)
    return complex(np.sum(c * K.kl[(a * t) % q]))


def bilinear_form(K: KloostermanTable, a: int, alpha: CoefficientVector, beta: CoefficientVector,
                  method: str = "auto") -> complex:
    """sum_m sum_n alpha_m beta_n Kl(amn; q)."""
    q = K.q.q
    if a % q == 0:
        raise NotCoprime(f"q={q} divides a={a}")
    a %= q
    if method == "auto":
        method = "direct" if len(alpha) * len(beta) <= DIRECT_MAX_WORK else "convolution"
    if method == "direct":
        return _direct(K, a, alpha, beta)
    if method == "convolution":
        return _convolution(K, a, alpha, beta)
    raise ValueError(f"unknown method {method!r}")


def dual_path(K: KloostermanTable, a: int, alpha: CoefficientVector, beta: CoefficientVector) -> tuple[complex, complex, float]:
    d = _direct(K, a, alpha, beta)
    c = _convolution(K, a, alpha, beta)
    scale = max(abs(d), abs(c), 1e-300)
    return d, c, abs(d - c) / scale


# ---------------------------------------------------------------- bound shapes

def _require(name: str, ok: bool, cond: str):
    if not ok:
        raise PreconditionViolated(name, cond)


def bound_shape(name: str, ranges: RangeSpec, norms: dict | None = None, Q_smooth: float | None = None,
                **params) -> float:
    """Right-hand side of the named bound with implied constant 1 and epsilon = 0.

    norms holds l1a, l2a, l1b, l2b as needed.  Extra parameters:
    N1, N2 for the Young shapes; delta_EE and theta_g for trivial_3_1;
    theta (default 7/64) wherever it appears.
    """
    name = _ALIASES.get(name, name)
    q, M, N = ranges.q, ranges.M, ranges.N
    norms = norms or {}
    theta = params.get("theta", THETA)
    MN = M * N
    if name == "trivial":
        return math.sqrt(MN) * norms["l2a"] * norms["l2b"]
    if name == "typeII_5_1_1":
        _require(name, M <= q and N <= q, "M, N <= q")
        return math.sqrt(MN) * norms["l2a"] * norms["l2b"] * (M ** -0.5 + q ** 0.25 * N ** -0.5)
    if name == "typeI_5_1_2":
        _require(name, M <= q and N <= q, "M, N <= q")
        _require(name, MN <= q ** 1.5, "MN <= q^(3/2)")
        _require(name, M <= N * N, "M <= N^2")
        return math.sqrt(norms["l1a"] * norms["l2a"]) * M ** 0.25 * N * q ** 0.25 * M ** (-1 / 6) * N ** (-5 / 12)
    if name == "smooth_5_1_3":
        # the Q^A factor carries an unspecified absolute A; it is not modelled
        return MN * (q ** -0.125 + q ** 0.375 * MN ** -0.5)
    if name == "conj_5_4":
        _require(name, 1 <= M <= q and 1 <= N <= q, "1 <= M, N <= q")
        _require(name, q ** 0.25 <= MN <= q ** 1.25, "q^(1/4) <= MN <= q^(5/4)")
        _require(name, M <= q ** 0.25 * N, "M <= q^(1/4) N")
        return norms["l2a"] * norms["l2b"] * math.sqrt(MN) * (M ** -0.5 + q ** (11 / 64) * MN ** (-3 / 16))
    if name == "trivial_3_1":
        _require(name, 1 <= M <= N, "1 <= M <= N")
        tg = params.get("theta_g", 0.0)
        return N ** tg * math.sqrt(MN) / q + (math.sqrt(M / N) if params.get("delta_EE", False) else 0.0)
    if name == "shifted_3_2":
        _require(name, 1 <= M <= N, "N >= M >= 1")
        _require(name, MN <= q * q, "MN <= q^2")
        r = (N / (q * M)) ** 0.25
        return r * (1 + r) + q ** (-0.5 + theta)
    if name in ("young_4_1a", "young_4_1b"):
        N1, N2 = params["N1"], params["N2"]
        _require(name, N1 <= N2, "N1 <= N2")
        _require(name, abs(N1 * N2 - N) <= 1e-9 * N, "N1 N2 = N")
        base = math.sqrt(MN) / q ** (2 - theta)
        if name == "young_4_1a":
            tail = N1 * math.sqrt(M) / (q * math.sqrt(N))
            return base + min(math.sqrt(M * q / N) + tail,
                              q ** 0.25 / math.sqrt(N1) + math.sqrt(M * N1 / N) + tail,
                              math.sqrt(M) * N1 / math.sqrt(N))
        return (base + min(N1 ** 2 / math.sqrt(MN), N ** (1 / 6) * N1 * q ** 0.5 / (N2 * M ** (2 / 3)))
                + math.sqrt(M / N) + math.sqrt(M) * N1 / (q * math.sqrt(N)) + M ** 1.5 / (N2 * math.sqrt(N)))
    raise ValueError(f"unknown bound {name!r}")


def ratio_experiment(q: int, alpha_mode: str, beta_mode: str, M: int, N: int, bounds, a: int = 1,
                     n_start: int = 1) -> list[BoundReport]:
    K = build_table(q)
    alpha = coefficients(alpha_mode, M)
    beta = coefficients(beta_mode, N, n_start)
    lhs = abs(bilinear_form(K, a, alpha, beta))
    ranges = RangeSpec(q, M, N)
    norms = {"l1a": alpha.l1, "l2a": alpha.l2, "l1b": beta.l1, "l2b": beta.l2}
    out = []
    for b in bounds:
        name = _ALIASES.get(b, b)
        if name == "typeI_5_1_2" and beta.kind != "ones":
            raise PreconditionViolated(name, "beta must be the all-ones sequence")
        out.append(BoundReport(name, lhs, bound_shape(name, ranges, norms),
                               {"q": q, "M": M, "N": N, "alpha": alpha_mode, "beta": beta_mode, "a": a}))
    return out


# ---------------------------------------------------------------- congruence sums

def _hecke(kind: str, n_max: int) -> np.ndarray:
    if kind == "ones":
        return np.ones(n_max + 1)
    from .modforms import hecke_coefficients
    return hecke_coefficients(kind, n_max)


def _weighted(kind: str, X: float, W) -> tuple[np.ndarray, np.ndarray]:
    """Integers in the support of W(n/X) and lambda(n) W(n/X) on them."""
    W = W if W is not None else bump
    lo = max(1, int(math.floor(X / 2)))
    hi = int(math.ceil(2 * X))
    n = np.arange(lo, hi + 1)
    w = _hecke(kind, hi)[n] * np.asarray(W(n / X), dtype=float)
    keep = w != 0
    return n[keep], w[keep]


def _residues(n: np.ndarray, w: np.ndarray, q: int) -> np.ndarray:
    return np.bincount(n % q, weights=w, minlength=q)


def congruence_bilinear(f: str, g: str, M: float, N: float, q: int, sign: int, W1=None, W2=None) -> float:
    """(MN)^(-1/2) sum_{m = +/-n mod q, m != n} lam_f(m) lam_g(n) W1(m/M) W2(n/N)
    minus (q (MN)^(1/2))^(-1) times the same sum over all m, n."""
    m, wf = _weighted(f, M, W1)
    n, wg = _weighted(g, N, W2)
    A = _residues(m, wf, q)
    B = _residues(n, wg, q)
    r = np.arange(q)
    congruent = float(np.sum(A * B[(sign * r) % q]))
    # remove m = n, which is congruent for sign +1 and, for sign -1, only when q | m
    common, im, jn = np.intersect1d(m, n, return_indices=True)
    diag_terms = wf[im] * wg[jn]
    if sign == -1:
        diag_terms = diag_terms[common % q == 0]
    first = congruent - float(np.sum(diag_terms))
    second = float(wf.sum() * wg.sum()) / q
    return (first - second) / math.sqrt(M * N)


def congruence_bilinear_brute(f: str, g: str, M: float, N: float, q: int, sign: int, W1=None, W2=None) -> float:
    m, wf = _weighted(f, M, W1)
    n, wg = _weighted(g, N, W2)
    mask = ((m[:, None] - sign * n[None, :]) % q == 0) & (m[:, None] != n[None, :])
    P = np.multiply.outer(wf, wg)
    return float((P[mask].sum() - P.sum() / q) / math.sqrt(M * N))


def shifted_error_ratio(f: str, g: str, M: float, N: float, q: int, sign: int) -> BoundReport:
    """|congruence_bilinear| against (N/(qM))^(1/4)(1+(N/(qM))^(1/4)) + q^(-1/2+theta)."""
    if f not in ("tau", "tau_normalized", "delta"):
        raise PreconditionViolated("shifted_error_ratio", "f cuspidal (tau)")
    lhs = abs(congruence_bilinear(f, g, M, N, q, sign))
    rhs = bound_shape("shifted_3_2", RangeSpec(q, int(M), int(N)))
    return BoundReport("shifted_3_2", lhs, rhs, {"q": q, "M": M, "N": N, "f": f, "g": g, "sign": sign})


def trivial_shift_report(f: str, g: str, M: float, N: float, q: int, sign: int) -> BoundReport:
    lhs = abs(congruence_bilinear(f, g, M, N, q, sign))
    ee = f in ("divisor", "E") and g in ("divisor", "E")
    rhs = bound_shape("trivial_3_1", RangeSpec(q, int(M), int(N)), delta_EE=ee)
    return BoundReport("trivial_3_1", lhs, rhs, {"q": q, "M": M, "N": N, "f": f, "g": g, "sign": sign})


# ---------------------------------------------------------------- trilinear sums

@dataclass
class TrilinearResult:
    value: float
    reports: list[BoundReport]


def trilinear_congruence(lam: str, N1: float, N2: float, M: float, q: int, sign: int,
                         windows=(None, None, None)) -> TrilinearResult:
    """(MN)^(-1/2) sum_{n1 n2 = +/-m mod q} lambda(m) W1(n1/N1) W2(n2/N2) W3(m/M), N = N1 N2."""
    if N1 > N2:
        raise PreconditionViolated("trilinear_congruence", "N1 <= N2")
    W1, W2, W3 = windows
    n1, w1 = _weighted("ones", N1, W1)
    n2, w2 = _weighted("ones", N2, W2)
    m, w3 = _weighted(lam, M, W3)
    A1 = _residues(n1, w1, q)
    A2 = _residues(n2, w2, q)
    L = _residues(m, w3, q)
    r = np.arange(q)
    P = np.bincount((np.multiply.outer(r, r) % q).ravel(), weights=np.multiply.outer(A1, A2).ravel(), minlength=q)
    N = N1 * N2
    value = float(np.sum(P * L[(sign * r) % q]) / math.sqrt(M * N))
    ranges = RangeSpec(q, max(1, int(round(M))), max(1, int(round(N))))
    reports = [BoundReport(b, abs(value), bound_shape(b, ranges, N1=N1, N2=N2, theta=THETA),
                           {"q": q, "M": M, "N1": N1, "N2": N2, "sign": sign})
               for b in ("young_4_1a", "young_4_1b")]
    return TrilinearResult(value, reports)


def trilinear_brute(lam: str, N1: float, N2: float, M: float, q: int, sign: int, windows=(None, None, None)) -> float:
    W1, W2, W3 = windows
    n1, w1 = _weighted("ones", N1, W1)
    n2, w2 = _weighted("ones", N2, W2)
    m, w3 = _weighted(lam, M, W3)
    total = 0.0
    for a, wa in zip(n1, w1):
        prod = (a * n2) % q
        for b, wb in zip(m, w3):
            hit = (prod - sign * b) % q == 0
            total += wa * wb * float(np.sum(w2[hit]))
    return total / math.sqrt(M * N1 * N2)
