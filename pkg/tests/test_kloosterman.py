import math

import numpy as np
import pytest

from expsum.errors import CompositeModulus
from expsum.ffq import primes_up_to
from expsum.kloosterman import build_table, kloosterman_raw, parseval_sum, verify_weil


def test_raw_small_values():
    assert kloosterman_raw(1, 1, 3) == pytest.approx(-1, abs=1e-12)
    assert kloosterman_raw(1, 1, 5) == pytest.approx(0.3819660112501051, abs=1e-12)


@pytest.mark.parametrize("q", [3, 5, 101, 997])
def test_ramanujan_sum(q):
    assert kloosterman_raw(0, 1, q) == pytest.approx(-1, abs=1e-9)


def test_table_q3_and_q5():
    K = build_table(3)
    assert np.allclose(K.kl, [-1 / math.sqrt(3), -1 / math.sqrt(3), 2 / math.sqrt(3)])
    assert build_table(5).kl[1] == pytest.approx(0.3819660112501051 / math.sqrt(5), abs=1e-12)


@pytest.mark.parametrize("q", [7, 31, 101])
def test_table_matches_raw(q):
    K = build_table(q)
    for a in range(q):
        assert K.kl[a] == pytest.approx(kloosterman_raw(a, 1, q).real / math.sqrt(q), abs=1e-10)


def test_realness_up_to_1009():
    assert max(build_table(q).max_imag for q in primes_up_to(1009) if q > 2) <= 1e-8


@pytest.mark.parametrize("q", [3, 5, 101])
def test_weil(q):
    m, a = verify_weil(q)
    assert m <= 2
    assert abs(build_table(q).kl[a]) == m
    if q == 3:
        assert m == pytest.approx(2 / math.sqrt(3))


def test_weil_rejects_composite():
    with pytest.raises(CompositeModulus):
        verify_weil(9)


@pytest.mark.parametrize("q", [7, 101, 499])
def test_parseval(q):
    assert parseval_sum(build_table(q)) == pytest.approx(q - 1, rel=1e-6)


def test_parseval_direct_q7():
    total = sum((kloosterman_raw(a, 1, 7).real / math.sqrt(7)) ** 2 for a in range(7))
    assert total == pytest.approx(6, rel=1e-12)


@pytest.mark.parametrize("q", [31, 101])
def test_substitution_invariance(q, rng):
    # d -> c d gives S(a, 1) = S(a c, 1/c); S depends on the product of its arguments
    for _ in range(100):
        a, c = int(rng.integers(0, q)), int(rng.integers(1, q))
        assert kloosterman_raw(a * c, pow(c, -1, q), q) == pytest.approx(kloosterman_raw(a, 1, q), abs=1e-9)


def test_square_scaling_is_not_an_invariant():
    # kl[a] = kl[a c^2] does not hold in general
    K = build_table(13)
    assert any(abs(K.kl[a] - K.kl[a * 4 % 13]) > 1e-3 for a in range(1, 13))
