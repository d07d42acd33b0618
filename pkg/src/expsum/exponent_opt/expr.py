"""Exact piecewise-linear expressions: linear forms, max/min trees and guarded branches."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

Rat = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class LinForm:
    """sum_v coeffs[v] * v + const, with coefficients kept sorted by variable name."""

    coeffs: tuple = ()
    const: Fraction = Fraction(0)

    @staticmethod
    def make(coeffs: Mapping[str, Fraction] | None = None, const=0) -> "LinForm":
        items = tuple(sorted((v, _frac(c)) for v, c in (coeffs or {}).items() if c != 0))
        return LinForm(items, _frac(const))

    @staticmethod
    def var(name: str) -> "LinForm":
        return LinForm(((name, Fraction(1)),), Fraction(0))

    @staticmethod
    def constant(c) -> "LinForm":
        return LinForm((), _frac(c))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def variables(self) -> list[str]:
        return [v for v, _ in self.coeffs]

    def __add__(self, other: "LinForm") -> "LinForm":
        d = self.as_dict()
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return LinForm.make(d, self.const + other.const)

    def __neg__(self) -> "LinForm":
        return LinForm(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "LinForm") -> "LinForm":
        return self + (-other)

    def scale(self, c) -> "LinForm":
        c = _frac(c)
        if c == 0:
            return LinForm()
        return LinForm(tuple((v, c * a) for v, a in self.coeffs), c * self.const)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            total += c * point[v]
        return total

    def __str__(self) -> str:
        parts = []
        for v, c in self.coeffs:
            mag = abs(c)
            term = v if mag == 1 else f"{format_rat(mag)}*{v}"
            parts.append(("-" if c < 0 else "+", term))
        if self.const != 0 or not parts:
            parts.append(("-" if self.const < 0 else "+", format_rat(abs(self.const))))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out


@dataclass(frozen=True)
class Lin:
    form: LinForm

    def evaluate(self, point) -> Fraction:
        return self.form.evaluate(point)

    def __str__(self) -> str:
        return str(self.form)


@dataclass(frozen=True)
class Max:
    children: tuple

    def evaluate(self, point) -> Fraction:
        return max(c.evaluate(point) for c in self.children)

    def __str__(self) -> str:
        return "max(" + ", ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Min:
    children: tuple

    def evaluate(self, point) -> Fraction:
        return min(c.evaluate(point) for c in self.children)

    def __str__(self) -> str:
        return "min(" + ", ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Guarded:
    """then if lhs <= rhs, otherwise the constant fallback."""

    lhs: LinForm
    rhs: LinForm
    then: "PLExpr"
    fallback: Fraction

    @property
    def guard(self) -> LinForm:
        return self.lhs - self.rhs  # holds when <= 0

    def holds(self, point) -> bool:
        return self.guard.evaluate(point) <= 0

    def evaluate(self, point) -> Fraction:
        return self.then.evaluate(point) if self.holds(point) else self.fallback

    def __str__(self) -> str:
        return f"if({self.lhs} <= {self.rhs}, {self.then}, {format_rat(self.fallback)})"


PLExpr = Union[Lin, Max, Min, Guarded]


class AlgebraError(ValueError):
    pass


def add(a: PLExpr, b: PLExpr) -> PLExpr:
    """a + b, pushing linear summands into max/min children (a + max(x, y) = max(a + x, a + y))."""
    if isinstance(a, Lin) and isinstance(b, Lin):
        return Lin(a.form + b.form)
    if isinstance(b, Lin) and not isinstance(a, Lin):
        a, b = b, a
    if isinstance(a, Lin):
        if a.form == LinForm():
            return b
        if isinstance(b, (Max, Min)):
            return type(b)(tuple(add(a, c) for c in b.children))
        raise AlgebraError("a guarded expression can only appear as a whole summand-free term")
    if isinstance(a, Guarded) or isinstance(b, Guarded):
        raise AlgebraError("a guarded expression can only appear as a whole summand-free term")
    return type(a)(tuple(add(c, b) for c in a.children))


def scale(e: PLExpr, c: Fraction) -> PLExpr:
    c = _frac(c)
    if isinstance(e, Lin):
        return Lin(e.form.scale(c))
    if c == 1:
        return e
    if isinstance(e, Guarded):
        raise AlgebraError("a guarded expression cannot be scaled")
    if c == 0:
        return Lin(LinForm())
    kids = tuple(scale(k, c) for k in e.children)
    if c > 0:
        return type(e)(kids)
    return Min(kids) if isinstance(e, Max) else Max(kids)


def variables_of(e: PLExpr, out: list[str]) -> list[str]:
    def note(form: LinForm):
        for v in form.variables():
            if v not in out:
                out.append(v)

    if isinstance(e, Lin):
        note(e.form)
    elif isinstance(e, Guarded):
        note(e.lhs)
        note(e.rhs)
        variables_of(e.then, out)
    else:
        for c in e.children:
            variables_of(c, out)
    return out


RELATIONS = ("<=", ">=", "==", "<", ">")


@dataclass(frozen=True)
class Constraint:
    lhs: LinForm
    op: str
    rhs: LinForm

    def normalized(self) -> tuple[LinForm, str]:
        """(g, kind) with kind 'le' meaning g <= 0 and 'eq' meaning g == 0.

        Strict relations are read as their closure.
        """
        if self.op in ("<=", "<"):
            return self.lhs - self.rhs, "le"
        if self.op in (">=", ">"):
            return self.rhs - self.lhs, "le"
        return self.lhs - self.rhs, "eq"

    def holds(self, point) -> bool:
        g, kind = self.normalized()
        val = g.evaluate(point)
        return val == 0 if kind == "eq" else val <= 0

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"


@dataclass(frozen=True)
class PiecewiseProgram:
    objective: Min
    constraints: tuple

    @property
    def variables(self) -> list[str]:
        out = variables_of(self.objective, [])
        for c in self.constraints:
            for v in c.lhs.variables() + c.rhs.variables():
                if v not in out:
                    out.append(v)
        return out

    def evaluate(self, point) -> Fraction:
        return self.objective.evaluate(point)

    def feasible_at(self, point) -> bool:
        return all(c.holds(point) for c in self.constraints)

    def with_constraints(self, extra) -> "PiecewiseProgram":
        return PiecewiseProgram(self.objective, self.constraints + tuple(extra))

    def __str__(self) -> str:
        terms = ",\n".join(f"  {c}" for c in self.objective.children)
        cons = "\n".join(f"  {c};" for c in self.constraints)
        return f"max min(\n{terms}\n)\nst\n{cons}\n"
