import time
from fractions import Fraction as F

import numpy as np
import pytest

from expsum.errors import Infeasible, ParseError, Unbounded
from expsum.exponent_opt import (SHIPPED, Constraint, format_program, load_program, maximize,
                                 parse_expr, parse_program, probe_check, program_text, verdict, verify_certificate)


def test_appendix_741_exact():
    p = load_program("appendix_741.plp")
    t0 = time.perf_counter()
    r = maximize(p)
    assert time.perf_counter() - t0 < 10
    assert r.value == F(-1, 68)
    expect = {"m": F(161, 306), "n": F(449, 306), "n1": F(9, 17), "n2": F(287, 306)}
    assert {k: r.argmax[k] for k in expect} == expect
    assert verify_certificate(p, r)
    assert probe_check(p, r, names=["m"])
    assert probe_check(p, r)


def test_appendix_742_exact():
    p = load_program("appendix_742.plp")
    r = maximize(p)
    assert r.value == F(-1, 64)
    assert (r.argmax["m"], r.argmax["n"]) == (F(47, 32), F(17, 32))
    assert verify_certificate(p, r)
    assert isinstance(r.value, F) and all(isinstance(v, F) for v in r.argmax.values())


def test_toy_program():
    p = parse_program("max min(x, 1-x) st x>=0; x<=1")
    assert len(p.objective.children) == 2
    r = maximize(p)
    assert r.value == F(1, 2) and r.argmax["x"] == F(1, 2)


def test_parse_errors():
    for bad in ("min(", "max min(x, st x >= 0", "max x st x >= 0; x <= 1 $", "max x y st x >= 0"):
        with pytest.raises(ParseError):
            parse_program(bad)
    with pytest.raises(ParseError) as e:
        parse_program("max x\nst x >= 0;\n x <= (1")
    assert e.value.line == 3


@pytest.mark.parametrize("name", SHIPPED)
def test_round_trip(name):
    p = load_program(name)
    text = format_program(p)
    q = parse_program(text)
    assert format_program(q) == text
    assert q.variables == p.variables
    r = maximize(p)
    assert maximize(q).value == r.value
    assert verify_certificate(q, r)


def test_exact_fractions_kept():
    e = parse_expr("7/64 (a - b) + 1/3")
    assert e.evaluate({"a": F(1), "b": F(0)}) == F(7, 64) + F(1, 3)


def test_corrupted_certificate():
    p = load_program("appendix_741.plp")
    r = maximize(p)
    r.value += F(1, 10 ** 9)
    assert not verify_certificate(p, r)
    r = maximize(p)
    r.argmax["m"] += F(1, 1000)
    assert not verify_certificate(p, r)


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        maximize(parse_program("max x st x >= 1; x <= 0"))
    with pytest.raises(Unbounded):
        maximize(parse_program("max x st x >= 0"))


def test_fallback_lint():
    p = parse_program("max min(if(x - 1/2 <= 0, x, 1), 2 - x) st 0 <= x; x <= 1")
    r = maximize(p)
    assert r.value == F(1)
    assert r.warnings and "fallback" in r.warnings[0]
    assert not maximize(load_program("appendix_741.plp")).warnings


def test_verdicts():
    text = program_text("cuspidal_62.plp")
    r = maximize(parse_program(text))
    assert r.value == 0 and verdict(text, r) == "FEASIBLE"
    # the display's exponent -1/64 + 5 eta/4 <= -eta needs eta <= 1/144
    at68 = text.replace("eta == 1/144", "eta == 1/68")
    r68 = maximize(parse_program(at68))
    assert r68.value == F(19, 1088) and verdict(at68, r68) == "INFEASIBLE"
    text = program_text("eisenstein_63.plp")
    r = maximize(parse_program(text))
    assert r.value == F(-1, 32) and verdict(text, r) == "FEASIBLE"
    assert verdict("max x st 0 <= x; x <= 1", maximize(parse_program("max x st 0 <= x; x <= 1"))) is None


# ---------------------------------------------------------------- random programs against a grid oracle

H = 20    # grid points per unit


def _random_program(rng):
    k = int(rng.integers(1, 4))
    names = ["x", "y", "z"][:k]
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        branches = [(rng.integers(-3, 4, size=k), F(int(rng.integers(-4, 5)), 2))
                    for _ in range(int(rng.integers(1, 4)))]
        terms.append(branches)

    def lin(c, b):
        return " + ".join(f"({int(ci)}) {v}" for ci, v in zip(c, names)) + f" + ({b})"
    parts = []
    for branches in terms:
        s = [lin(c, b) for c, b in branches]
        parts.append(s[0] if len(s) == 1 else "max(" + ", ".join(s) + ")")
    cons = [f"0 <= {v}; {v} <= 1" for v in names]
    text = f"max min({', '.join(parts)}) st " + "; ".join(cons)
    return text, names, terms


def _grid_max(names, terms, extra=None):
    axes = np.meshgrid(*[np.linspace(0, 1, H + 1)] * len(names), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=1)
    if extra is not None:
        pts = pts[extra(pts)]
    val = np.full(len(pts), np.inf)
    for branches in terms:
        t = np.max([pts @ c.astype(float) + float(b) for c, b in branches], axis=0)
        val = np.minimum(val, t)
    return val.max()


def test_random_programs_match_grid(rng):
    for _ in range(50):
        text, names, terms = _random_program(rng)
        p = parse_program(text)
        r = maximize(p)
        assert verify_certificate(p, r)
        g = _grid_max(names, terms)
        lip = max(np.abs(c).sum() for br in terms for c, _ in br)
        assert g <= float(r.value) + 1e-12
        assert float(r.value) - g <= lip / (2 * H) + 1e-12
        # pruning never changes the answer
        assert maximize(p, prune=False).value == r.value


def test_monotone_under_added_constraint(rng):
    for _ in range(25):
        text, names, _ = _random_program(rng)
        tighter = text + f"; {names[0]} <= 1/3"
        assert maximize(parse_program(tighter)).value <= maximize(parse_program(text)).value


def test_constraint_relations_expand():
    p = parse_program("max x st 0 <= x <= y <= 1/2")
    assert len(p.constraints) == 3 and all(isinstance(c, Constraint) for c in p.constraints)
    assert maximize(p).value == F(1, 2)
