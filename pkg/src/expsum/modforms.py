"""Level-one modular form data: tau, the divisor function, Bessel kernels,
the Voronoi formula, and L(Delta, s)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np
from scipy import special

from .errors import NotCoprime, PreconditionViolated, TrivialCharacter
from .window import bump

EULER_GAMMA = 0.5772156649015329
WEIGHT = 12
TAU_MAX = 10 ** 6
QUAD_NODES = 4000
DUAL_TAIL = 1e-12


# ---------------------------------------------------------------- coefficients

def divisor_counts(n_max: int) -> np.ndarray:
    """d[n] for 0 <= n <= n_max (d[0] = 0), by sieve."""
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def _jacobi_cube(n_terms: int) -> list[int]:
    """Coefficients of prod (1 - x^n)^3 up to x^(n_terms-1)."""
    c = [0] * n_terms
    k = 0
    while k * (k + 1) // 2 < n_terms:
        c[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return c


def _pack(coeffs: list[int], width: int) -> gmpy2.mpz:
    half = 1 << (8 * width - 1)
    raw = b"".join((c + half).to_bytes(width, "little") for c in coeffs)
    off = int.from_bytes(half.to_bytes(width, "little") * len(coeffs), "little")
    return gmpy2.mpz(int.from_bytes(raw, "little") - off)


def _unpack(value: gmpy2.mpz, width: int, count: int) -> list[int]:
    # balanced digits: add half to every digit so each lands in [0, 2^(8w))
    half = 1 << (8 * width - 1)
    off = int.from_bytes(half.to_bytes(width, "little") * count, "little")
    raw = int(value + off).to_bytes(width * count + width, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") - half for i in range(count)]


def _square_truncated(coeffs: list[int], n_terms: int) -> list[int]:
    peak = max(abs(c) for c in coeffs) or 1
    bits = 2 * peak.bit_length() + len(coeffs).bit_length() + 2
    width = (bits + 7) // 8
    a = _pack(coeffs, width)
    return _unpack(a * a, width, 2 * len(coeffs) - 1)[:n_terms]


@dataclass(frozen=True, eq=False)
class TauTable:
    n_max: int
    tau: list  # tau[n] exact ints, tau[0] = 0

    def __getitem__(self, n: int) -> int:
        return self.tau[n]


@lru_cache(maxsize=4)
def tau_table(n_max: int) -> TauTable:
    """tau(1..n_max) from Delta = x * (prod (1 - x^n)^3)^8."""
    if n_max > TAU_MAX:
        raise PreconditionViolated("tau_table", f"n_max <= {TAU_MAX}")
    c = _jacobi_cube(n_max)
    for _ in range(3):
        c = _square_truncated(c, n_max)
    return TauTable(n_max, [0] + c)


@lru_cache(maxsize=8)
def hecke_coefficients(kind: str, n_max: int) -> np.ndarray:
    """lambda(n) for 0 <= n <= n_max: the divisor function or tau(n)/n^(11/2)."""
    if kind in ("divisor", "E"):
        return divisor_counts(n_max).astype(float)
    if kind in ("tau", "tau_normalized", "delta"):
        t = tau_table(n_max).tau
        out = np.zeros(n_max + 1)
        for n in range(1, n_max + 1):
            # straight float conversion of tau(n) / n^(11/2), accurate to rounding
            out[n] = float(gmpy2.mpq(t[n]) / gmpy2.mpz(n) ** 5) / math.sqrt(n)
        return out
    raise ValueError(f"unknown coefficient family {kind!r}")


def hecke_identity_holds(T: TauTable, m: int, n: int) -> bool:
    g = math.gcd(m, n)
    rhs = sum(d ** 11 * T[m * n // (d * d)] for d in range(1, g + 1) if g % d == 0)
    return T[m] * T[n] == rhs


def deligne_bound_violations(T: TauTable, n_max: int) -> list[int]:
    """n <= n_max with tau(n)^2 > d(n)^2 n^11 (exact integer comparison)."""
    d = divisor_counts(n_max)
    return [n for n in range(1, n_max + 1) if T[n] * T[n] > int(d[n]) ** 2 * n ** 11]


# ---------------------------------------------------------------- Bessel kernels

def bessel(kind: str, order: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if kind == "J":
        return special.jv(order, x)
    if kind == "Y":
        return special.yv(order, x)
    if kind == "K":
        return special.kv(order, x)
    raise ValueError(f"unknown Bessel kind {kind!r}")


def bessel_derivative(kind: str, order: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    fn = {"J": special.jvp, "Y": special.yvp, "K": special.kvp}[kind]
    return fn(order, x)


@dataclass(frozen=True)
class BesselKernel:
    """The pair J_+ / J_- of the Voronoi formula for Delta (weight 12) or E (t = 0)."""
    form: str  # "tau" or "divisor"

    def plus(self, x) -> np.ndarray:
        if self.form == "tau":
            return 2 * math.pi * bessel("J", WEIGHT - 1, x)  # i^12 = 1
        return -2 * math.pi * bessel("Y", 0, x)

    def minus(self, x) -> np.ndarray:
        if self.form == "tau":
            return np.zeros_like(np.asarray(x, dtype=float))
        return 4 * bessel("K", 0, x)

    def plus_derivative(self, x) -> np.ndarray:
        if self.form == "tau":
            return 2 * math.pi * bessel_derivative("J", WEIGHT - 1, x)
        return -2 * math.pi * bessel_derivative("Y", 0, x)

    def minus_derivative(self, x) -> np.ndarray:
        if self.form == "tau":
            return np.zeros_like(np.asarray(x, dtype=float))
        return 4 * bessel_derivative("K", 0, x)


def kernel_for(form: str) -> BesselKernel:
    if form in ("tau", "delta"):
        return BesselKernel("tau")
    if form in ("divisor", "E"):
        return BesselKernel("divisor")
    raise ValueError(f"unknown form {form!r}")


# ---------------------------------------------------------------- Voronoi

def _nodes(n: int = QUAD_NODES) -> tuple[np.ndarray, float]:
    # the bump and all its derivatives vanish at both ends, so the plain
    # trapezoidal rule on (1/2, 2) converges faster than any power of 1/n
    v = np.linspace(0.5, 2.0, n + 1)[1:-1]
    return v, 1.5 / n


def bessel_transform(form: str, scale: float, y, sign: int = 1, derivative: bool = False,
                     nodes: int = QUAD_NODES) -> np.ndarray:
    """W~_(+/-)(y) = int W(u/scale) J_(+/-)(4 pi sqrt(u y)) du.  With derivative=True returns y W~'(y)."""
    ker = kernel_for(form)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    v, h = _nodes(nodes)
    w = bump(v) * h * scale
    out = np.empty(y.shape)
    chunk = max(1, 2_000_000 // v.size)
    for start in range(0, y.size, chunk):
        x = 4 * math.pi * np.sqrt(np.multiply.outer(y[start:start + chunk], scale * v))
        if derivative:
            f = ker.plus_derivative(x) if sign > 0 else ker.minus_derivative(x)
            f = f * x / 2
        else:
            f = ker.plus(x) if sign > 0 else ker.minus(x)
        out[start:start + chunk] = f @ w
    return out


def _dual_length(scale: float, c: int) -> int:
    # the transform is negligible once 4 pi sqrt(2 scale y) passes ~ 4 pi * 1100, y = n / c^2
    return int(4 * 1100 * c * c / scale) + 50


@dataclass
class VoronoiResult:
    lhs: complex
    rhs: complex
    main_term: float
    dual_terms: int

    @property
    def diff(self) -> float:
        return abs(self.lhs - self.rhs)


def voronoi_check(form: str, a: int, c: int, X: float, nodes: int = QUAD_NODES) -> VoronoiResult:
    """Both sides of the Voronoi formula for W(x) = bump(x/X)."""
    if math.gcd(a, c) != 1:
        raise NotCoprime(f"gcd({a}, {c}) != 1")
    if c > 30 or X > 1e4:
        raise PreconditionViolated("voronoi_check", "c <= 30 and X <= 1e4")
    n_dual = _dual_length(X, c)
    n_max = max(int(2 * X) + 1, n_dual)
    lam = hecke_coefficients(form, n_max)
    n = np.arange(1, int(2 * X) + 1)
    ph = np.exp(2j * math.pi * ((a * n) % c) / c)
    lhs = complex(np.sum(lam[n] * bump(n / X) * ph))

    abar = pow(a, -1, c) if c > 1 else 0
    main = 0.0
    if kernel_for(form).form == "divisor":
        v, h = _nodes(nodes)
        u = X * v
        main = float(np.sum((np.log(u) + 2 * EULER_GAMMA - 2 * math.log(c)) * bump(v)) * h * X / c)
    m = np.arange(1, n_dual + 1)
    y = m / (c * c)
    dual = 0j
    for sign in (1, -1):
        if sign < 0 and kernel_for(form).form == "tau":
            continue
        wt = bessel_transform(form, X, y, sign, nodes=nodes)
        phase = np.exp(-2j * math.pi * sign * ((abar * m) % c) / c)
        dual += np.sum(lam[m] * wt * phase)
    rhs = main + dual / c
    return VoronoiResult(lhs, complex(rhs), main, n_dual)


# ---------------------------------------------------------------- decay of W~

@dataclass
class DecayReport:
    M: float
    q_eps: float
    eps: float
    constants: dict
    decay_threshold_z: float
    max_beyond_threshold: float

    def to_json(self) -> dict:
        return {"M": self.M, "q_eps": self.q_eps, "eps": self.eps,
                "constants": {f"{k[0]}:{k[1]}:{k[2]}": v for k, v in self.constants.items()},
                "decay_threshold_z": self.decay_threshold_z,
                "max_beyond_threshold": self.max_beyond_threshold}


def _second_derivative(form, M, y, sign):
    # y^2 W~''(y) from y W~'(y): d/dy (y W~') = W~' + y W~'', via a centred difference in log y
    hstep = 1e-3
    up = bessel_transform(form, M, y * math.exp(hstep), sign, derivative=True)
    dn = bessel_transform(form, M, y * math.exp(-hstep), sign, derivative=True)
    mid = bessel_transform(form, M, y, sign, derivative=True)
    # d/dlog y (y W~') = y W~' + y^2 W~''
    return (up - dn) / (2 * hstep) - mid


def bessel_transform_decay_check(M: float, q_eps: float, eps: float = 0.1, form: str = "divisor",
                                 z_grid: np.ndarray | None = None) -> DecayReport:
    """Measure sup |y^j W~^(j)| / envelope over a log grid of z = M y, for (i, j) in {(0,0), (2,0), (0,1)}.

    The pair (i, j) follows the decay statement: i is the power of the
    (1 + (My)^(1/2)/q_eps) damping factor, j the derivative order.
    """
    if z_grid is None:
        z_grid = np.logspace(-3, math.log10(4 * q_eps ** 3 * 4), 160)
    y = z_grid / M
    consts = {}
    for sign in (1, -1):
        if sign < 0 and kernel_for(form).form == "tau":
            continue
        vals = {0: np.abs(bessel_transform(form, M, y, sign)),
                1: np.abs(bessel_transform(form, M, y, sign, derivative=True))}
        for i, j in ((0, 0), (2, 0), (0, 1)):
            env = M * (1 + z_grid) ** (j / 2) * (1 + z_grid ** (-eps)) * (1 + np.sqrt(z_grid) / q_eps) ** (-i)
            consts[(sign, i, j)] = float(np.max(vals[j] / env))
    zt = 4 * q_eps ** 3
    far = np.logspace(math.log10(zt), math.log10(zt) + 1, 40)
    tail = 0.0
    for sign in (1, -1):
        if sign < 0 and kernel_for(form).form == "tau":
            continue
        tail = max(tail, float(np.max(np.abs(bessel_transform(form, M, far / M, sign)))))
    return DecayReport(M, q_eps, eps, consts, zt, tail)


# ---------------------------------------------------------------- root numbers

def twisted_root_number(chi) -> complex:
    """epsilon(Delta x chi) = epsilon(Delta) * epsilon_chi^2 with epsilon(Delta) = +1."""
    if chi.is_trivial:
        raise TrivialCharacter("root number needs a non-trivial character")
    e = chi.gauss_sum() / math.sqrt(chi.group.q)
    return complex(e * e)


def pair_root_number(f: str, g: str, parity: int) -> int:
    """epsilon(f, g, chi) for f, g in {tau, E}: chi(-1) if exactly one is holomorphic."""
    holo = {"tau": True, "delta": True, "E": False, "divisor": False}
    return parity if holo[f] != holo[g] else 1


# ---------------------------------------------------------------- L(Delta, s)

L_DELTA_TERMS = 60


def _lambda_delta(w: complex, A: float, n_terms: int = L_DELTA_TERMS) -> mpmath.mpc:
    T = tau_table(n_terms)
    total = mpmath.mpc(0)
    w = mpmath.mpc(w)
    for n in range(1, n_terms + 1):
        x = 2 * mpmath.pi * n
        total += T[n] * (x ** (-w) * mpmath.gammainc(w, x * A)
                         + x ** (-(WEIGHT - w)) * mpmath.gammainc(WEIGHT - w, x / A))
    return total


def completed_l_delta(s: complex, A: float = 1.0) -> complex:
    """Lambda(s) = (2 pi)^(-w) Gamma(w) L(Delta, s) with w = s + 11/2; Lambda(s) = Lambda(1 - s)."""
    with mpmath.workdps(30):
        return complex(_lambda_delta(complex(s) + (WEIGHT - 1) / 2, A))


def l_delta(s: complex, A: float = 1.0) -> complex:
    """L(Delta, s) = sum tau(n) n^(-11/2) n^(-s), centre of symmetry at s = 1/2."""
    with mpmath.workdps(30):
        w = mpmath.mpc(complex(s)) + mpmath.mpf(WEIGHT - 1) / 2
        lam = _lambda_delta(w, A)
        return complex(lam / ((2 * mpmath.pi) ** (-w) * mpmath.gamma(w)))


# ---------------------------------------------------------------- mixed moment

MIXED_MOMENT_MAX_Q = 61


@dataclass
class MixedMomentResult:
    q: int
    cutoff_X: float
    value: complex
    by_parity: dict
    main_term: float

    @property
    def ratio(self) -> float:
        return self.value.real / self.main_term

    def to_json(self) -> dict:
        return {"q": self.q, "cutoff_X": self.cutoff_X, "value": self.value.real,
                "value_imag": self.value.imag, "main_term": self.main_term, "ratio": self.ratio,
                "by_parity": {str(k): v.real for k, v in self.by_parity.items()},
                "by_parity_imag": {str(k): v.imag for k, v in self.by_parity.items()}}


def _residue_class_sums(lam_m: np.ndarray, lam_n: np.ndarray, V, q: int, T: int) -> np.ndarray:
    """C[r1, r2] = sum over mn <= T, m = r1, n = r2 mod q of lam_m(m) lam_n(n) (mn)^(-1/2) V(mn/q^2)."""
    root = math.isqrt(T)
    qq = float(q * q)
    C = np.zeros(q * q)
    wm = lam_m / np.sqrt(np.maximum(np.arange(lam_m.size), 1))
    wn = lam_n / np.sqrt(np.maximum(np.arange(lam_n.size), 1))

    def add(m: np.ndarray, n: np.ndarray):
        w = wm[m] * wn[n] * V(np.log(m * n / qq))
        C[:] += np.bincount((m % q) * q + (n % q), weights=w, minlength=q * q)

    # m <= sqrt(T) with every admissible n, then n <= sqrt(T) with the remaining m
    for m in range(1, root + 1):
        n = np.arange(1, T // m + 1)
        add(np.full(n.size, m), n)
    for n in range(1, root + 1):
        m = np.arange(root + 1, T // n + 1)
        if m.size:
            add(m, np.full(m.size, n))
    return C.reshape(q, q)


def mixed_moment(q: int, cutoff_X: float = 100.0) -> MixedMomentResult:
    """(1/(q-2)) sum over chi != 1 of L(Delta x chi, 1/2) L(chi-bar, 1/2)^2, one character at a time.

    Each summand comes from the two-term approximate functional equation with
    the weight V built from Gamma_C(s + 11/2) and two Gamma_R factors, and
    root number epsilon(Delta, E, chi) = chi(-1).
    """
    from .dirichlet import V_spline, dirichlet_group, zeta

    if q > MIXED_MOMENT_MAX_Q:
        raise PreconditionViolated("mixed_moment", f"q <= {MIXED_MOMENT_MAX_Q}")
    G = dirichlet_group(q)
    T = int(cutoff_X * q * q)
    lam_f = hecke_coefficients("tau", T)
    lam_g = divisor_counts(T).astype(float)
    X = G.values  # X[j, r] = chi_j(r)
    by_parity = {}
    for sigma in (1, -1):
        V = V_spline("tauE", sigma, math.log(1.0 / (q * q)) - 0.5, math.log(cutoff_X) + 0.5)
        first = _residue_class_sums(lam_f, lam_g, V, q, T)
        # second sum: coefficients swapped, lam_f(n) lam_g(m) chi(m) conj chi(n)
        second = _residue_class_sums(lam_g, lam_f, V, q, T)
        eps = pair_root_number("tau", "E", sigma)
        C = first + eps * second
        js = [j for j in G.parity_indices(sigma) if j != 0]
        per_chi = np.einsum("jr,rs,js->j", X[js], C, np.conj(X[js]))
        by_parity[sigma] = complex(per_chi.sum() / (q - 2))
    value = by_parity[1] + by_parity[-1]
    main = l_delta(1.0).real ** 2 / zeta(2.0).real
    return MixedMomentResult(q, cutoff_X, value, by_parity, main)
