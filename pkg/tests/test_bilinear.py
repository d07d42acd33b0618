import math

import numpy as np
import pytest

from expsum import golden
from expsum.bilinear import (CoefficientVector, RangeSpec, bilinear_form, bound_shape, coefficients,
                             congruence_bilinear, congruence_bilinear_brute, dual_path, ratio_experiment,
                             shifted_error_ratio, trilinear_brute, trilinear_congruence)
from expsum.errors import NotCoprime, PreconditionViolated
from expsum.kloosterman import build_table
from expsum.modforms import divisor_counts
from expsum.window import bump


@pytest.fixture(scope="module")
def K101():
    return build_table(101)


def test_norms_recompute():
    v = coefficients("rademacher:3", 40)
    assert v.l1 == pytest.approx(np.abs(v.values).sum(), rel=1e-12)
    assert v.l2 ** 2 == pytest.approx(np.sum(np.abs(v.values) ** 2), rel=1e-12)
    with pytest.raises(ValueError):
        CoefficientVector(0, np.ones(3))


def test_rangespec():
    r = RangeSpec(101, 10, 20)
    assert r.Mstar * 10 == 101 ** 2 and r.Nstar * 20 == 101 ** 2
    assert r.mu * math.log(101) == pytest.approx(math.log(10))


def test_delta_gives_kloosterman(K101):
    d = coefficients("ones", 1)
    for a in (1, 2, 77):
        assert bilinear_form(K101, a, d, d) == pytest.approx(K101.kl[a], abs=1e-12)
    with pytest.raises(NotCoprime):
        bilinear_form(K101, 202, d, d)


@pytest.mark.parametrize("am,bm,M,N", [("ones", "ones", 10, 10), ("rademacher:1", "divisor", 30, 7),
                                       ("tau", "rademacher:2", 12, 40)])
def test_symmetry_and_bounds(K101, am, bm, M, N):
    a, b = coefficients(am, M), coefficients(bm, N)
    v = bilinear_form(K101, 3, a, b)
    assert v == bilinear_form(K101, 3, b, a)
    assert abs(v) <= 2 * a.l1 * b.l1 + 1e-9
    assert abs(v) <= 2 * math.sqrt(M * N) * a.l2 * b.l2 + 1e-9


def test_dual_path_q997():
    K = build_table(997)
    n = math.isqrt(997)
    d, c, rel = dual_path(K, 1, coefficients("ones", n), coefficients("ones", n))
    assert rel <= 1e-7
    # supports beyond q wrap around residue classes on both paths
    _, _, rel = dual_path(build_table(31), 5, coefficients("divisor", 70), coefficients("ones", 45, start=20))
    assert rel <= 1e-7


def test_trivial_ratio_at_most_two():
    for seed in range(1, 6):
        r = ratio_experiment(101, f"rademacher:{seed}", "ones", 20, 20, ["trivial"])[0]
        assert r.ratio <= 2
        assert r.ratio == pytest.approx(r.lhs_abs / r.rhs_shape)


def test_shapes_by_substitution():
    q = 10 ** 12
    r = RangeSpec(q, 10 ** 6, 10 ** 6)
    norms = {"l2a": 3.0, "l2b": 5.0, "l1a": 7.0, "l1b": 1.0}
    triv = bound_shape("trivial", r, norms)
    assert bound_shape("typeII", r, norms) / triv == pytest.approx(1 + q ** -0.25, rel=1e-12)
    saving = bound_shape("conj_5_4", r, norms) / triv
    assert saving * q ** (1 / 64) == pytest.approx(1 + q ** (-15 / 64), rel=1e-12)
    s = bound_shape("shifted_3_2", RangeSpec(101, 64, 64))
    x = 101 ** -0.25
    assert s == pytest.approx(x * (1 + x) + 101 ** (-0.5 + 7 / 64))


def test_typeI_preconditions():
    norms = {"l1a": 1.0, "l2a": 1.0}
    with pytest.raises(PreconditionViolated):
        bound_shape("typeI", RangeSpec(10 ** 6, 200, 10), norms)
    with pytest.raises(PreconditionViolated):
        bound_shape("typeI", RangeSpec(101, 200, 50), norms)
    assert bound_shape("typeI", RangeSpec(10 ** 6, 50, 10), norms) > 0
    with pytest.raises(PreconditionViolated):
        ratio_experiment(101, "ones", "divisor", 5, 5, ["typeI"])
    with pytest.raises(ValueError):
        bound_shape("nonsense", RangeSpec(101, 5, 5), norms)


def test_C3_regression():
    r = ratio_experiment(997, "ones", "ones", 31, 31, ["typeII"])[0]
    assert r.ratio <= golden.constant("C3") * (1 + 1e-9)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("f,g", [("divisor", "divisor"), ("tau", "divisor")])
def test_congruence_matches_brute(f, g, sign):
    fast = congruence_bilinear(f, g, 50, 50, 101, sign)
    assert fast == pytest.approx(congruence_bilinear_brute(f, g, 50, 50, 101, sign), abs=1e-10)


def test_congruence_empty_first_term():
    M = N = 20
    q = 4 * max(M, N) + 7
    m = np.arange(10, 41)
    w = divisor_counts(40)[m] * bump(m / M)
    second = w.sum() ** 2 / (q * math.sqrt(M * N))
    for sign in (1, -1):
        assert congruence_bilinear("divisor", "divisor", M, N, q, sign) == pytest.approx(-second, rel=1e-12)


def test_shifted_regression_q101():
    C4 = golden.constant("C4")
    r = max(shifted_error_ratio("tau", "divisor", 64, 64, 101, s).ratio for s in (1, -1))
    assert r <= C4 * (1 + 1e-9)
    with pytest.raises(PreconditionViolated):
        shifted_error_ratio("divisor", "divisor", 64, 64, 101, 1)


def test_trilinear_brute():
    for lam in ("divisor", "tau"):
        for sign in (1, -1):
            t = trilinear_congruence(lam, 4, 16, 60, 101, sign)
            assert t.value == pytest.approx(trilinear_brute(lam, 4, 16, 60, 101, sign), abs=1e-10)
            assert [r.bound_name for r in t.reports] == ["young_4_1a", "young_4_1b"]
    with pytest.raises(PreconditionViolated):
        trilinear_congruence("divisor", 16, 4, 60, 101, 1)


def test_trilinear_large_q_is_exact_products():
    N1, N2, M, q = 3, 5, 12, 1009
    d = divisor_counts(100)
    total = 0.0
    for n1 in range(1, 2 * N1 + 1):
        for n2 in range(1, 2 * N2 + 1):
            m = n1 * n2
            total += bump(n1 / N1) * bump(n2 / N2) * d[m] * bump(m / M)
    expect = total / math.sqrt(M * N1 * N2)
    assert trilinear_congruence("divisor", N1, N2, M, q, 1).value == pytest.approx(expect, rel=1e-10)
