import numpy as np
import pytest

from expsum.complete_sums import (Quadruple, ShiftParams, _two_equation_brute, family, is_diagonal_typeI,
                                  is_diagonal_typeII, scan_prop52, sigma1_closed_form, sigma1_direct, sigma1_value,
                                  sigma_complete, sigma_complete_all_h, sigma_incomplete, two_equation_sum,
                                  two_variable_sum)
from expsum.errors import WorkBudgetExceeded, ZeroForm
from expsum.ffq import build_context
from expsum.kloosterman import build_table


def loop_sum(K, b, s_range, h=0):
    q = K.q.q
    total = 0j
    for s in s_range:
        for r in range(q):
            p = 1.0
            for c in b:
                p *= K.kl[(s * (r + c)) % q]
            total += p * np.exp(2j * np.pi * h * s / q)
    return total


@pytest.mark.parametrize("b,expected", [((5, 5, 5, 5), True), ((1, 2, 1, 2), True), ((1, 2, 3, 4), False),
                                        ((3, 3, 7, 7), True), ((1, 2, 2, 1), True)])
def test_typeI(b, expected):
    assert is_diagonal_typeI(b) is expected


@pytest.mark.parametrize("b,expected", [((1, 2, 2, 1), True), ((1, 2, 3, 4), False), ((4, 3, 4, 3), True),
                                        ((3, 4, 4, 4), False)])
def test_typeII(b, expected):
    assert is_diagonal_typeII(b) is expected


def test_family_sizes():
    assert len(family(2, lambda b: False)) == 16
    assert all(not is_diagonal_typeI(b) for b in family(2, is_diagonal_typeI))


def test_incomplete_matches_loops():
    K = build_table(7)
    v = sigma_incomplete(K, (1, 2, 3, 4), ShiftParams(1, 0, 3))
    assert v == pytest.approx(loop_sum(K, (1, 2, 3, 4), range(1, 4)), abs=1e-10)


def test_incomplete_periodicity():
    K = build_table(11)
    b = (1, 2, 3, 5)
    full = sigma_complete(K, b, 0)
    assert sigma_incomplete(K, b, ShiftParams(1, 0, 11)) == pytest.approx(full, abs=1e-8)
    tail = sigma_incomplete(K, b, ShiftParams(1, 0, 5))  # 27 = 2 * 11 + 5
    assert sigma_incomplete(K, b, ShiftParams(3, 0, 9)) == pytest.approx(2 * full + tail, abs=1e-8)


def test_diagonal_incomplete_nonnegative():
    K = build_table(13)
    assert sigma_incomplete(K, (2, 2, 2, 2), ShiftParams(2, 0, 3)).real >= 0


@pytest.mark.parametrize("b,h", [((3, 3, 3, 3), 0), ((1, 2, 3, 4), 5), ((1, 1, 2, 6), 3)])
def test_complete_matches_loops(b, h):
    K = build_table(11)
    assert sigma_complete(K, b, h) == pytest.approx(loop_sum(K, b, range(11), h), abs=1e-9)


def test_all_h_vector():
    K = build_table(13)
    v = sigma_complete_all_h(K, (1, 2, 3, 4))
    assert np.allclose(v, [sigma_complete(K, (1, 2, 3, 4), h) for h in range(13)])


def test_hermitian_symmetry(rng):
    K = build_table(31)
    for _ in range(10):
        b = [int(x) for x in rng.integers(0, 31, 4)]
        h = int(rng.integers(0, 31))
        lhs = sigma_complete(K, b, h)
        rhs = np.conj(sigma_complete(K, (b[2], b[3], b[0], b[1]), -h))
        assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("q,tol", [(7, 1e-8), (31, 1e-7), (101, 1e-6)])
def test_sigma1_dual_path(q, tol):
    K = build_table(q)
    assert abs(sigma1_direct(q) - sigma1_closed_form(K)) <= tol * q
    assert sigma1_value(K) == pytest.approx(sigma1_closed_form(K))


def test_two_variable_excluded_case():
    assert two_variable_sum((1, 0), (0, 1), 0, 13) == pytest.approx((13 - 1) ** 2)


def test_two_variable_against_loops():
    q = 11
    l3, l4 = (1, 1), (1, -1)
    _, chars, inv = build_context(q)
    for h in (0, 3):
        total = 0j
        for u in range(1, q):
            for v in range(1, q):
                x3, x4 = (u + v + h) % q, (u - v - h) % q
                if x3 and x4:
                    total += np.exp(2j * np.pi * (inv.inv[u] + inv.inv[v] - inv.inv[x3] - inv.inv[x4]) / q)
        assert two_variable_sum(l3, l4, h, q) == pytest.approx(total, abs=1e-10)


def test_zero_form():
    with pytest.raises(ZeroForm):
        two_variable_sum((0, 0), (1, 1), 0, 7)


@pytest.mark.parametrize("b", [(1, 2, 3, 4), (2, 5, 3, 3), (4, 4, 1, 6), (2, 2, 5, 5)])
def test_two_equation_vs_brute(b):
    q = 13
    for h in (0, 7):
        assert two_equation_sum(b, h, q) == pytest.approx(_two_equation_brute(Quadruple(*b), h, q), abs=1e-8)


def test_decomposition(rng):
    q = 31
    K = build_table(q)
    s1 = sigma1_value(K)
    for _ in range(20):
        b = [int(x) for x in rng.integers(0, q, 4)]
        h = int(rng.integers(0, q))
        assert abs(sigma_complete(K, b, h) - s1 - two_equation_sum(b, h, q)) <= 1e-6 * q


def test_degenerate_branch_capped():
    with pytest.raises(WorkBudgetExceeded):
        two_equation_sum((3, 3, 5, 5), 0, 67)


def test_scan_budget_and_diagonal_effect():
    K = build_table(101)
    with pytest.raises(WorkBudgetExceeded):
        scan_prop52(K, 10, [0], budget=10 ** 4)
    rep = scan_prop52(K, 2, [0, 1, 50])
    # the excluded diagonal quadruple carries no cancellation
    assert abs(sigma_complete(K, (1, 2, 1, 2), 0)) / 101 > 5 * rep.max_ratio
    js = rep.to_json()
    assert set(js) >= {"q", "family", "max_abs", "max_ratio", "argmax", "scanned"}
