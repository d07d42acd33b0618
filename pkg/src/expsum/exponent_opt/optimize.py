"""Global maximisation of min-of-piecewise-linear objectives by branch enumeration.

Maximise v subject to v <= every top-level term.  A term v <= max(...) is a
disjunction over its children, v <= min(...) a conjunction, and a guarded
term splits into guard-true (guard added, recurse) and guard-false (the
closed complement of the guard plus v <= fallback).  Each leaf of the
enumeration is an exact LP; the global value is the best leaf.  Partial
assignments are bounded by their own LP and pruned when they cannot reach the
incumbent.
"""

from __future__ import annotations

import itertools
import re
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from ..errors import Infeasible, Unbounded
from .expr import Guarded, Lin, LinForm, Max, Min, PiecewiseProgram, PLExpr, format_rat
from .parser import parse_program
from .simplex import solve_lp

V = "__v"
_VFORM = LinForm.var(V)


@dataclass
class OptResult:
    value: Fraction
    argmax: dict
    region: list
    leaves: int = 0
    lps_solved: int = 0
    seconds: float = 0.0
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": format_rat(self.value),
            "argmax": {k: format_rat(v) for k, v in self.argmax.items()},
            "region": [describe(c) for c in self.region],
            "leaves": self.leaves,
            "lps_solved": self.lps_solved,
            "warnings": self.warnings,
        }


def describe(choice) -> str:
    kind = choice[0]
    if kind == "lin":
        return "lin"
    if kind == "max":
        return f"max[{choice[1]}]/{describe(choice[2])}"
    if kind == "min":
        return "min(" + ", ".join(describe(c) for c in choice[1]) + ")"
    if choice[1]:
        return f"if:true/{describe(choice[2])}"
    return "if:false"


def alternatives(e: PLExpr) -> list[tuple[tuple, tuple]]:
    """Ways to satisfy v <= e: list of (constraints g <= 0, choice record)."""
    if isinstance(e, Lin):
        return [((_VFORM - e.form,), ("lin",))]
    if isinstance(e, Max):
        return [(cons, ("max", i, ch)) for i, c in enumerate(e.children) for cons, ch in alternatives(c)]
    if isinstance(e, Min):
        out = []
        for combo in itertools.product(*(alternatives(c) for c in e.children)):
            cons = tuple(itertools.chain.from_iterable(c for c, _ in combo))
            out.append((cons, ("min", tuple(ch for _, ch in combo))))
        return out
    if isinstance(e, Guarded):
        g = e.guard
        true = [((g,) + cons, ("if", True, ch)) for cons, ch in alternatives(e.then)]
        false = [((-g, _VFORM - LinForm.constant(e.fallback)), ("if", False))]
        return true + false
    raise TypeError(type(e))


def _rows(forms_le, forms_eq):
    rows = []
    for g in forms_le:
        rows.append((g.as_dict(), "le", -g.const))
    for g in forms_eq:
        rows.append((g.as_dict(), "eq", -g.const))
    return rows


class _Solver:
    def __init__(self, p: PiecewiseProgram):
        self.p = p
        self.vars = p.variables
        self.lp_vars = self.vars + [V]
        self.base_le, self.base_eq = [], []
        for c in p.constraints:
            g, kind = c.normalized()
            (self.base_le if kind == "le" else self.base_eq).append(g)
        self.cache: dict = {}
        self.solved = 0

    def lp(self, extra: tuple):
        key = frozenset(extra)
        hit = self.cache.get(key)
        if hit is None:
            rows = _rows(self.base_le + list(extra), self.base_eq)
            hit = solve_lp({V: Fraction(1)}, rows, self.lp_vars)
            self.cache[key] = hit
            self.solved += 1
        return hit


def _lex_key(point: dict, names) -> tuple:
    return tuple(point[v] for v in names)


def maximize(p: PiecewiseProgram, prune: bool = True) -> OptResult:
    t0 = time.perf_counter()
    S = _Solver(p)
    feas = solve_lp({}, _rows(S.base_le, S.base_eq), S.lp_vars)
    if feas.status == "infeasible":
        raise Infeasible("constraint set is empty")
    terms = [alternatives(t) for t in p.objective.children]
    # single-alternative terms first: they tighten every node for free
    order = sorted(range(len(terms)), key=lambda k: (len(terms[k]), k))
    best = {"value": None, "x": None, "choices": None, "leaf": None}
    leaves = 0

    def visit(depth: int, cons: tuple, choices: dict):
        nonlocal leaves
        bounded = depth > 0
        if bounded:
            r = S.lp(cons)
            if r.status == "infeasible":
                return
            if r.status == "unbounded":
                raise Unbounded("objective unbounded on a branch")
            if prune and best["value"] is not None and r.value < best["value"]:
                return
        if depth == len(order):
            leaves += 1
            # leaf LP solution is r
            x = {v: r.x[v] for v in S.vars}
            better = best["value"] is None or r.value > best["value"]
            tie = not better and r.value == best["value"] and _lex_key(x, S.vars) < _lex_key(best["x"], S.vars)
            if better or tie:
                best.update(value=r.value, x=x, choices=dict(choices), leaf=cons)
            return
        k = order[depth]
        for extra, ch in terms[k]:
            choices[k] = ch
            visit(depth + 1, cons + tuple(extra), choices)
        choices.pop(k, None)

    if not order:
        raise Unbounded("empty objective")
    visit(0, (), {})
    if best["value"] is None:
        raise Infeasible("every branch is infeasible")
    region = [best["choices"][k] for k in range(len(terms))]
    res = OptResult(best["value"], best["x"], region, leaves, S.solved, time.perf_counter() - t0)
    res.warnings = _lint(p, res)
    return res


def _lint(p: PiecewiseProgram, r: OptResult) -> list[str]:
    out = []
    for k, (t, ch) in enumerate(zip(p.objective.children, r.region)):
        for fb in _fallbacks_taken(t, ch):
            if fb == r.value:
                out.append(f"term {k}: optimum touches the if-fallback {format_rat(fb)}")
    return out


def _fallbacks_taken(e: PLExpr, ch) -> list[Fraction]:
    if ch[0] == "max":
        return _fallbacks_taken(e.children[ch[1]], ch[2])
    if ch[0] == "min":
        return [f for c, sub in zip(e.children, ch[1]) for f in _fallbacks_taken(c, sub)]
    if ch[0] == "if":
        return _fallbacks_taken(e.then, ch[2]) if ch[1] else [e.fallback]
    return []


def _choice_holds(e: PLExpr, ch, point: dict, value: Fraction) -> bool:
    kind = ch[0]
    if kind == "lin":
        return isinstance(e, Lin) and e.evaluate(point) >= value
    if kind == "max":
        return isinstance(e, Max) and _choice_holds(e.children[ch[1]], ch[2], point, value)
    if kind == "min":
        return isinstance(e, Min) and all(_choice_holds(c, sub, point, value) for c, sub in zip(e.children, ch[1]))
    if not isinstance(e, Guarded):
        return False
    g = e.guard.evaluate(point)
    if ch[1]:
        return g <= 0 and _choice_holds(e.then, ch[2], point, value)
    return g >= 0 and e.fallback >= value


def verify_certificate(p: PiecewiseProgram, r: OptResult) -> bool:
    try:
        point = {v: Fraction(r.argmax[v]) for v in p.variables}
    except KeyError:
        return False
    if not p.feasible_at(point):
        return False
    if p.evaluate(point) != r.value:
        return False
    if len(r.region) != len(p.objective.children):
        return False
    return all(_choice_holds(t, ch, point, r.value) for t, ch in zip(p.objective.children, r.region))


def probe_check(p: PiecewiseProgram, r: OptResult, step: Fraction = Fraction(1, 1000), names=None) -> bool:
    """Moving one coordinate by +/- step never raises the objective at a feasible probe."""
    for v in names or p.variables:
        for s in (step, -step):
            pt = dict(r.argmax)
            pt[v] = pt[v] + s
            if p.feasible_at(pt) and p.evaluate(pt) > r.value:
                return False
    return True


def load_program(name: str) -> PiecewiseProgram:
    """A shipped program by file name, e.g. 'appendix_741.plp'."""
    return parse_program(program_text(name))


def program_text(name: str) -> str:
    return resources.files("expsum.programs").joinpath(name).read_text()


_VERDICT = re.compile(r"#\s*verdict:\s*value\s*<=\s*(-?\d+(?:/\d+)?)")


def verdict_bound(text: str) -> Fraction | None:
    """The bound from a '# verdict: value <= RAT' line, if the program has one."""
    m = _VERDICT.search(text)
    return Fraction(m.group(1)) if m else None


def verdict(text: str, r: OptResult) -> str | None:
    b = verdict_bound(text)
    if b is None:
        return None
    return "FEASIBLE" if r.value <= b else "INFEASIBLE"


SHIPPED = ("appendix_741.plp", "appendix_742.plp", "cuspidal_62.plp", "eisenstein_63.plp")
