"""Dirichlet characters modulo a prime, central L-values and the fourth moment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .errors import NotCoprime, PoleAtOne, PreconditionViolated, TrivialCharacter, UnsupportedPair
from .ffq import as_modulus, dlog_table, unit_roots

# B_2k / (2k)! for k = 1..6
_BERNOULLI = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160, -691 / 1307674368000)
VALUE_TABLE_MAX_Q = 4096


# ---------------------------------------------------------------- Hurwitz zeta

def hurwitz_zeta(s: complex, x, n0: int | None = None) -> np.ndarray:
    """zeta(s, x) by Euler-Maclaurin with Bernoulli corrections through B_12.

    x may be an array of values in (0, 1].  The cut-off n0 grows with |s| so
    that the remainder stays below 1e-10 for |Im s| <= 50.
    """
    s = complex(s)
    if s == 1:
        raise PoleAtOne("zeta(s, x) has a pole at s = 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if n0 is None:
        n0 = 30 + int(2 * abs(s))
    n = np.arange(n0)
    head = np.sum((x[:, None] + n[None, :]) ** (-s), axis=1)
    a = x + n0
    tail = a ** (1 - s) / (s - 1) + 0.5 * a ** (-s)
    # sum_k B_2k/(2k)! * s(s+1)...(s+2k-2) a^(-s-2k+1)
    rising = s
    for k, b in enumerate(_BERNOULLI, start=1):
        tail = tail + b * rising * a ** (-s - 2 * k + 1)
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
    return head + tail


def zeta(s) -> complex:
    return complex(hurwitz_zeta(s, 1.0)[0])


def zeta_vec(s: np.ndarray) -> np.ndarray:
    return np.array([zeta(z) for z in np.ravel(s)]).reshape(np.shape(s))


# ---------------------------------------------------------------- characters

@dataclass(frozen=True, eq=False)
class DirichletGroup:
    q: int
    g: int
    dlog: np.ndarray
    powers: np.ndarray

    @property
    def order(self) -> int:
        return self.q - 1

    def character(self, j: int) -> "DirichletCharacter":
        return DirichletCharacter(self, j % self.order)

    def characters(self):
        return [self.character(j) for j in range(self.order)]

    def parity_indices(self, sigma: int) -> np.ndarray:
        """Indices j with chi_j(-1) = sigma; chi_j(-1) = (-1)^j."""
        j = np.arange(self.order)
        return j[(j % 2 == 0) == (sigma == 1)]

    @property
    def values(self) -> np.ndarray:
        """values[j, n] = chi_j(n) for n mod q (zero at n = 0)."""
        return _value_table(self.q)


@lru_cache(maxsize=16)
def dirichlet_group(q) -> DirichletGroup:
    pm = as_modulus(q)
    g, dlog, powers = dlog_table(pm.q)
    return DirichletGroup(pm.q, g, dlog, powers)


@lru_cache(maxsize=4)
def _value_table(q: int) -> np.ndarray:
    if q > VALUE_TABLE_MAX_Q:
        raise PreconditionViolated("character table", f"q <= {VALUE_TABLE_MAX_Q}")
    G = dirichlet_group(q)
    j = np.arange(q - 1)
    k = G.dlog[1:]
    tab = np.zeros((q - 1, q), dtype=complex)
    tab[:, 1:] = unit_roots(q - 1, np.multiply.outer(j, k))
    tab.setflags(write=False)
    return tab


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    group: DirichletGroup
    j: int

    @property
    def is_trivial(self) -> bool:
        return self.j == 0

    @property
    def parity(self) -> int:
        """The exponent a in {0, 1} with chi(-1) = (-1)^a."""
        return self.j % 2

    @property
    def sign(self) -> int:
        return 1 - 2 * self.parity

    def __call__(self, n) -> np.ndarray:
        q = self.group.q
        n = np.asarray(n, dtype=np.int64) % q
        k = self.group.dlog[n]
        out = unit_roots(q - 1, self.j * np.where(k < 0, 0, k))
        return np.where(n == 0, 0, out)

    def conj(self) -> "DirichletCharacter":
        return self.group.character(-self.j)

    def gauss_sum(self) -> complex:
        if self.is_trivial:
            raise TrivialCharacter("Gauss sum of the trivial character")
        q = self.group.q
        x = np.arange(1, q)
        return complex(np.sum(self(x) * unit_roots(q, x)))

    def root_number(self) -> complex:
        """epsilon(chi) = i^(-a) tau(chi) / sqrt(q)."""
        return (1j) ** (-self.parity) * self.gauss_sum() / math.sqrt(self.group.q)


def orthogonality_check(q: int, sigma: int, m: int, n: int, tol: float = 1e-9) -> tuple[complex, int]:
    """(2/(q-1)) sum_{chi(-1)=sigma} chi(m) conj chi(n) against delta(m=n) + sigma delta(m=-n)."""
    if (m * n) % q == 0:
        raise NotCoprime(f"q divides {m} * {n}")
    G = dirichlet_group(q)
    js = G.parity_indices(sigma)
    km, kn = int(G.dlog[m % q]), int(G.dlog[n % q])
    lhs = 2 / (q - 1) * complex(np.sum(unit_roots(q - 1, js * (km - kn))))
    rhs = int((m - n) % q == 0) + sigma * int((m + n) % q == 0)
    if abs(lhs - rhs) > tol:
        raise AssertionError(f"orthogonality fails at q={q}, sigma={sigma}, m={m}, n={n}: {lhs} != {rhs}")
    return lhs, rhs


# ---------------------------------------------------------------- central values

@dataclass(frozen=True, eq=False)
class CentralValueTable:
    q: int
    values: np.ndarray  # values[j] = L(chi_j, 1/2); values[0] is nan
    method: str = "hurwitz"


@lru_cache(maxsize=16)
def central_values(q) -> CentralValueTable:
    """L(chi_j, 1/2) = q^(-1/2) sum_a chi_j(a) zeta(1/2, a/q), for all j at once.

    Ordering a by discrete log turns the character sum into one length q-1 DFT.
    """
    G = dirichlet_group(q)
    z = hurwitz_zeta(0.5, G.powers / G.q)  # z[k] = zeta(1/2, g^k / q)
    n = G.order
    vals = np.fft.ifft(z) * n / math.sqrt(G.q)  # sum_k z[k] e(jk/n)
    vals = np.asarray(vals, dtype=complex)
    vals[0] = np.nan
    vals.setflags(write=False)
    return CentralValueTable(G.q, vals)


def central_value(chi: DirichletCharacter) -> complex:
    if chi.is_trivial:
        raise TrivialCharacter("central value requested for the trivial character")
    return complex(central_values(chi.group.q).values[chi.j])


def m4(q) -> float:
    """(1/(q-2)) sum over non-trivial chi of |L(chi, 1/2)|^4."""
    q = int(as_modulus(q).q)
    if q < 5:
        raise PreconditionViolated("m4", "q >= 5")
    v = central_values(q).values[1:]
    return float(np.sum(np.abs(v) ** 4) / (q - 2))


# ---------------------------------------------------------------- weight functions

def gamma_ratio_EE(s, a: int) -> np.ndarray:
    """pi^(-2s) [Gamma((1/2+a+s)/2) / Gamma((1/2+a)/2)]^4."""
    s = np.asarray(s, dtype=complex)
    h = (0.5 + a) / 2
    return np.exp(-2 * s * math.log(math.pi) + 4 * (special.loggamma(h + s / 2) - special.loggamma(h)))


def gamma_ratio_tauE(s, a: int) -> np.ndarray:
    """Gamma_C(6+s)/Gamma_C(6) times [pi^(-s/2) Gamma((1/2+a+s)/2) / Gamma((1/2+a)/2)]^2."""
    s = np.asarray(s, dtype=complex)
    h = (0.5 + a) / 2
    lg = -s * math.log(2 * math.pi) + special.loggamma(6 + s) - special.loggamma(6.0)
    lg = lg - s * math.log(math.pi) + 2 * (special.loggamma(h + s / 2) - special.loggamma(h))
    return np.exp(lg)


def gamma_ratio(pair: str, a: int):
    if pair == "EE":
        return lambda s: gamma_ratio_EE(s, a)
    if pair == "tauE":
        return lambda s: gamma_ratio_tauE(s, a)
    raise UnsupportedPair(pair)


def mellin_weight(G, x, c: float = 2.0, step: float = 0.05, t_max: float | None = None) -> np.ndarray:
    """(1/2 pi i) int_(c) G(s) x^(-s) ds/s by the trapezoidal rule, |Im s| <= t_max.

    Passing c < 0 (between 0 and the first pole of G) gives instead the
    integral on that line; the caller adds the residue 1 at s = 0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if t_max is None:
        t_max = _truncation(G, c)
    t = np.arange(-t_max, t_max + step / 2, step)
    s = c + 1j * t
    g = G(s) / s * step / (2 * math.pi)
    lx = np.log(x)
    out = np.empty(x.shape)
    chunk = max(1, 4_000_000 // t.size)
    for i in range(0, x.size, chunk):
        ph = np.exp(-np.multiply.outer(lx[i:i + chunk], s))
        out[i:i + chunk] = (ph @ g).real
    return out


def _truncation(G, c: float, target: float = 1e-14) -> float:
    t = 10.0
    while t < 400 and abs(G(c + 1j * t) / (c + 1j * t)) > target:
        t += 5.0
    return t + 5.0


def V_direct(pair: str, x, sigma: int) -> np.ndarray:
    """V(x) with the contour at Re s = 2 for x >= 1 and at Re s = -1/4 (plus the residue 1) for x < 1."""
    a = (1 - sigma) // 2
    G = gamma_ratio(pair, a)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    big = x >= 1
    if big.any():
        out[big] = mellin_weight(G, x[big], 2.0)
    if (~big).any():
        # the poles at 0 and -1/2 sit 1/4 from this line, so halve the step
        out[~big] = 1.0 + mellin_weight(G, x[~big], -0.25, step=0.025)
    return out


def V_EE(x, sigma: int) -> np.ndarray:
    return V_direct("EE", x, sigma)


@lru_cache(maxsize=32)
def V_spline(pair: str, sigma: int, log_lo: float, log_hi: float, h: float = 0.01):
    grid = np.arange(log_lo, log_hi + h, h)
    vals = V_direct(pair, np.exp(grid), sigma)
    return CubicSpline(grid, vals)


def decay_constant(pair: str, sigma: int, c: float) -> float:
    """C_c = (1/2 pi) int |G(c+it)| / |c+it| dt, so |V(x)| <= C_c x^(-c)."""
    G = gamma_ratio(pair, (1 - sigma) // 2)
    T = _truncation(G, c, 1e-18)
    t = np.arange(-T, T + 0.01, 0.01)
    s = c + 1j * t
    return float(np.sum(np.abs(G(s) / s)) * 0.01 / (2 * math.pi))


def tail_bound(pair: str, sigma: int, q: int, T: float, cs=None, s0s=(1.5, 2.0, 3.0)) -> float:
    """Upper bound for sum_{t > T} d_4(t) t^(-1/2) |V(t/q^2)|.

    Uses |V(x)| <= C_c x^(-c) and sum_{t>T} d_4(t) t^(-1/2-c) <= T^(-(1/2+c-s0)) zeta(s0)^4.
    """
    if cs is None:
        cs = np.arange(1.0, 10.01, 0.5)
    best = math.inf
    for c in cs:
        C = decay_constant(pair, sigma, float(c))
        for s0 in s0s:
            if 0.5 + c - s0 <= 0:
                continue
            b = C * q ** (2 * c) * T ** (-(0.5 + c - s0)) * zeta(s0).real ** 4
            best = min(best, b)
    return best


# ---------------------------------------------------------------- moment decomposition

@dataclass
class DecompositionResult:
    q: int
    sigma: int
    cutoff_X: float
    lhs: float
    rhs: float
    tol: float

    @property
    def diff(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_json(self) -> dict:
        return {"q": self.q, "sigma": self.sigma, "cutoff_X": self.cutoff_X, "lhs": self.lhs,
                "rhs": self.rhs, "diff": self.diff, "tol": self.tol}


def moment_by_characters(q: int, sigma: int) -> float:
    """M_{E,E,sigma}(q) = (1/(q-2)) sum_{chi != 1, chi(-1)=sigma} |L(chi,1/2)|^4."""
    G = dirichlet_group(q)
    js = [j for j in G.parity_indices(sigma) if j != 0]
    v = central_values(q).values[js]
    return float(np.sum(np.abs(v) ** 4) / (q - 2))


def congruence_sums(q: int, sigma: int, cutoff_X: float, pair: str = "EE") -> tuple[float, float, float]:
    """(S_plus, S_minus, S_all): sums of d(m)d(n)(mn)^(-1/2) V(mn/q^2) over mn <= X q^2, (mn,q)=1,
    restricted to m = n, m = -n mod q, or unrestricted."""
    from .modforms import divisor_counts

    T = int(cutoff_X * q * q)
    d = divisor_counts(T).astype(float)
    d[::q] = 0.0  # drop multiples of q
    V = V_spline(pair, sigma, math.log(1.0 / (q * q)) - 0.5, math.log(cutoff_X) + 0.5)
    w = d / np.sqrt(np.maximum(np.arange(T + 1), 1))
    qq = float(q * q)
    sp = sm = sa = 0.0
    for m in range(1, math.isqrt(T) + 1):
        if d[m] == 0.0:
            continue
        n = np.arange(m, T // m + 1)
        wt = w[m] * w[n] * V(np.log(m * n / qq))
        mult = np.where(n == m, 1.0, 2.0)  # (m, n) and (n, m)
        wt = wt * mult
        r = n % q
        sa += wt.sum()
        sp += wt[r == m % q].sum()
        sm += wt[r == (-m) % q].sum()
    return sp, sm, sa


def moment_by_congruences(q: int, sigma: int, cutoff_X: float) -> float:
    """B+ + sigma B- with B(+/-) = ((q-1)/(q-2)) S(+/-) - S_all/(q-2), times 2 from the product formula."""
    sp, sm, sa = congruence_sums(q, sigma, cutoff_X)
    c1 = (q - 1) / (q - 2)
    c2 = 1 / (q - 2)
    b_plus = c1 * sp - c2 * sa
    b_minus = c1 * sm - c2 * sa
    return b_plus + b_minus if sigma == 1 else b_plus - b_minus


def moment_decomposition_check(q: int, sigma: int, cutoff_X: float = 100.0) -> DecompositionResult:
    if q > 61:
        raise PreconditionViolated("moment_decomposition_check", "q <= 61")
    lhs = moment_by_characters(q, sigma)
    rhs = moment_by_congruences(q, sigma, cutoff_X)
    tb = tail_bound("EE", sigma, q, cutoff_X * q * q)
    c1 = (q - 1) / (q - 2)
    tol = (2 * c1 + 2 / (q - 2)) * tb + 1e-7 * max(1.0, abs(lhs))
    return DecompositionResult(q, sigma, cutoff_X, lhs, rhs, tol)


# ---------------------------------------------------------------- diagonal main term

def _l_delta_vec(s: np.ndarray) -> np.ndarray:
    from .modforms import l_delta
    return np.array([l_delta(complex(z)) for z in s])


def diagonal_main_term(f: str, g: str, sigma: int, q: int, radius: float = 0.1, nodes: int | None = None) -> float:
    """Residue at s = 0 of Gamma-ratio * L^(q)(f x g, 1+2s) / zeta^(q)(2+4s) * q^(2s) / s."""
    pair = {("E", "E"): "EE", ("tau", "E"): "tauE", ("E", "tau"): "tauE"}.get((f, g))
    if pair is None:
        raise UnsupportedPair(f"({f}, {g})")
    a = (1 - sigma) // 2
    if nodes is None:
        # L(Delta x E) is evaluated node by node and is slow; the integrand is smooth on the circle
        nodes = 128 if pair == "EE" else 32
    theta = 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    s = radius * np.exp(1j * theta)
    Gs = gamma_ratio(pair, a)(s)
    z2 = zeta_vec(2 + 4 * s) * (1 - q ** (-2 - 4 * s))
    if pair == "EE":
        num = zeta_vec(1 + 2 * s) ** 4 * (1 - q ** (-1 - 2 * s)) ** 4
    else:
        from .modforms import hecke_coefficients
        lam_q = hecke_coefficients("tau", q)[q]
        num = _l_delta_vec(1 + 2 * s) ** 2 * (1 - lam_q * q ** (-1 - 2 * s) + q ** (-2 - 4 * s)) ** 2
    F = Gs * num / z2 * q ** (2 * s) / s
    # (1/2 pi i) \oint F ds with ds = i s dtheta
    return float(np.mean(F * s).real)


def diagonal_direct_sum(q: int, sigma: int, terms: int | None = None) -> float:
    """sum_{(m,q)=1} d(m)^2 / m * V_EE(m^2/q^2)."""
    from .modforms import divisor_counts

    if terms is None:
        terms = 60 * q
    d = divisor_counts(terms).astype(float)
    m = np.arange(1, terms + 1)
    keep = m % q != 0
    m = m[keep]
    V = V_spline("EE", sigma, math.log(1.0 / (q * q)) - 0.5, math.log((terms / q) ** 2) + 0.5)
    return float(np.sum(d[m] ** 2 / m * V(np.log((m / q) ** 2))))
