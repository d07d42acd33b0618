"""Reader for piecewise-linear programs.

Grammar (keywords are lower case, '#' starts a comment):

    program    ::= 'max' expr 'st' constraint (';' constraint)* [';']
    constraint ::= expr (relop expr)+          relop in <=, >=, ==, =, <, >
    expr       ::= ['+' | '-'] term (('+' | '-') term)*
    term       ::= unary (('*' | '/') unary | unary)*     juxtaposition multiplies
    unary      ::= '-' unary | primary
    primary    ::= NUMBER | NAME | '(' expr ')'
                 | ('max' | 'min') '(' expr (',' expr)* ')'
                 | 'if' '(' expr '<=' expr ',' expr ',' expr ')'

Products need one constant factor, divisors must be non-zero constants, the
guard sides are linear and the if-fallback is a constant.  A strict relation
in a constraint is read as its closure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParseError
from .expr import (AlgebraError, Constraint, Guarded, Lin, LinForm, Max, Min, PiecewiseProgram, PLExpr, add,
                   scale)

KEYWORDS = {"max", "min", "if", "st"}
_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_']*)
  | (?P<op><=|>=|==|[-+*/(),;=<>])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, kw, op, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        col = pos - start + 1
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind == "name":
            word = m.group()
            out.append(Token("kw" if word in KEYWORDS else "name", word, line, col))
        elif kind in ("num", "op"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    # -- expressions

    def expr(self) -> PLExpr:
        neg = False
        if self.accept("+"):
            pass
        elif self.accept("-"):
            neg = True
        start = self.tok
        e = self.term()
        if neg:
            e = self.combine(lambda: scale(e, -1), start)
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok
            self.i += 1
            rhs = self.term()
            if op.text == "-":
                rhs = self.combine(lambda: scale(rhs, -1), op)
            e = self.combine(lambda: add(e, rhs), op)
        return e

    def combine(self, fn, tok: Token):
        try:
            return fn()
        except AlgebraError as err:
            self.error(str(err), tok)

    def _starts_primary(self) -> bool:
        t = self.tok
        return t.kind in ("num", "name") or (t.kind == "op" and t.text == "(") or t.text in ("max", "min", "if")

    def term(self) -> PLExpr:
        e = self.unary()
        while True:
            t = self.tok
            if t.kind == "op" and t.text in ("*", "/"):
                self.i += 1
                rhs = self.unary()
                e = self.product(e, rhs, t) if t.text == "*" else self.quotient(e, rhs, t)
            elif self._starts_primary():
                rhs = self.unary()
                e = self.product(e, rhs, t)
            else:
                return e

    def product(self, a: PLExpr, b: PLExpr, tok: Token) -> PLExpr:
        ca, cb = _constant(a), _constant(b)
        if ca is not None:
            return self.combine(lambda: scale(b, ca), tok)
        if cb is not None:
            return self.combine(lambda: scale(a, cb), tok)
        self.error("product of two non-constant factors is not linear", tok)

    def quotient(self, a: PLExpr, b: PLExpr, tok: Token) -> PLExpr:
        cb = _constant(b)
        if cb is None:
            self.error("divisor must be a constant", tok)
        if cb == 0:
            self.error("division by zero", tok)
        return self.combine(lambda: scale(a, 1 / cb), tok)

    def unary(self) -> PLExpr:
        t = self.tok
        if self.accept("-"):
            e = self.unary()
            return self.combine(lambda: scale(e, -1), t)
        return self.primary()

    def primary(self) -> PLExpr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Lin(LinForm.constant(Fraction(t.text)))
        if t.kind == "name":
            self.i += 1
            return Lin(LinForm.var(t.text))
        if t.kind == "op" and t.text == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.text in ("max", "min"):
            self.i += 1
            self.expect("(")
            kids = [self.expr()]
            while self.accept(","):
                kids.append(self.expr())
            self.expect(")")
            return (Max if t.text == "max" else Min)(tuple(kids))
        if t.text == "if":
            self.i += 1
            self.expect("(")
            lt = self.tok
            lhs = self.linear(self.expr(), lt)
            self.expect("<=")
            rt = self.tok
            rhs = self.linear(self.expr(), rt)
            self.expect(",")
            then = self.expr()
            self.expect(",")
            ft = self.tok
            fb = _constant(self.expr())
            if fb is None:
                self.error("if-fallback must be a constant", ft)
            self.expect(")")
            return Guarded(lhs, rhs, then, fb)
        found = t.text or "end of input"
        self.error(f"unexpected {found!r}")

    def linear(self, e: PLExpr, tok: Token) -> LinForm:
        if not isinstance(e, Lin):
            self.error("expected a linear expression", tok)
        return e.form

    # -- program

    def constraint(self) -> list[Constraint]:
        t = self.tok
        sides = [self.linear(self.expr(), t)]
        ops = []
        while self.tok.kind == "op" and self.tok.text in ("<=", ">=", "==", "=", "<", ">"):
            ops.append("==" if self.tok.text == "=" else self.tok.text)
            self.i += 1
            t = self.tok
            sides.append(self.linear(self.expr(), t))
        if not ops:
            self.error("expected a relation (<=, >=, ==)")
        return [Constraint(sides[k], ops[k], sides[k + 1]) for k in range(len(ops))]

    def program(self) -> PiecewiseProgram:
        self.expect("max")
        obj = self.expr()
        if not isinstance(obj, Min):
            obj = Min((obj,))
        self.expect("st")
        cons = self.constraint()
        while self.accept(";"):
            if self.tok.kind == "eof":
                break
            cons += self.constraint()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after constraints")
        return PiecewiseProgram(obj, tuple(cons))


def _constant(e: PLExpr) -> Fraction | None:
    if isinstance(e, Lin) and e.form.is_constant:
        return e.form.const
    return None


def parse_program(text: str) -> PiecewiseProgram:
    return _Parser(text).program()


def parse_expr(text: str) -> PLExpr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return e


def format_program(p: PiecewiseProgram) -> str:
    return str(p)
