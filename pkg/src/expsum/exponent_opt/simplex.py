"""Exact two-phase simplex over the rationals with Bland's rule.

Arithmetic is done in gmpy2.mpq for speed; inputs and outputs are Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import gmpy2

mpq = gmpy2.mpq
ZERO = mpq(0)


def to_mpq(x) -> "gmpy2.mpq":
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass
class LPResult:
    status: str  # optimal, infeasible, unbounded
    value: Fraction | None = None
    x: dict = field(default_factory=dict)
    pivots: int = 0


class _Tableau:
    def __init__(self, rows: list[list], basis: list[int], ncols: int):
        self.rows = rows  # each row: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, j: int, obj: list):
        row = self.rows[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            row = [a * inv for a in row]
            self.rows[r] = row
        nz = [k for k, a in enumerate(row) if a != 0]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[j]
                if f != 0:
                    for k in nz:
                        other[k] -= f * row[k]
        f = obj[j]
        if f != 0:
            for k in nz:
                obj[k] -= f * row[k]
        self.basis[r] = j
        self.pivots += 1

    def run(self, obj: list, allowed: int) -> str:
        """Maximise; obj holds reduced costs (positive = improving) and -value in the last slot."""
        n = self.ncols
        while True:
            # Bland: smallest improving column, then smallest basic index among ratio ties
            j = next((k for k in range(allowed) if obj[k] > 0), None)
            if j is None:
                return "optimal"
            best_r, best_ratio = None, None
            for i, row in enumerate(self.rows):
                a = row[j]
                if a > 0:
                    ratio = row[n] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[i] < self.basis[best_r])):
                        best_r, best_ratio = i, ratio
            if best_r is None:
                return "unbounded"
            self.pivot(best_r, j, obj)


def solve_lp(objective: Mapping[str, Fraction], rows: Sequence[tuple[Mapping[str, Fraction], str, Fraction]],
             variables: Sequence[str]) -> LPResult:
    """Maximise objective . x subject to rows (coeffs, 'le'|'eq', rhs); all variables are free.

    Free variables are split as x = x+ - x-.
    """
    idx = {v: k for k, v in enumerate(variables)}
    nv = len(variables)
    nstruct = 2 * nv
    m = len(rows)
    n_slack = sum(1 for _, kind, _ in rows if kind == "le")
    # columns: structural | slacks | artificials
    dense = []
    slack_col = nstruct
    basis = []
    needs_art = []
    slack_of_row = []
    for coeffs, kind, rhs in rows:
        r = [ZERO] * (nstruct + n_slack)
        for v, c in coeffs.items():
            c = to_mpq(c)
            k = idx[v]
            r[2 * k] += c
            r[2 * k + 1] -= c
        b = to_mpq(rhs)
        if kind == "le":
            r[slack_col] = mpq(1)
            slack_of_row.append(slack_col)
            slack_col += 1
        else:
            slack_of_row.append(None)
        if b < 0:
            r = [-a for a in r]
            b = -b
        dense.append((r, b))
        own = slack_of_row[-1]
        needs_art.append(own is None or r[own] != 1)
    n_art = sum(needs_art)
    ncols = nstruct + n_slack + n_art
    tab_rows = []
    art = nstruct + n_slack
    for i, (r, b) in enumerate(dense):
        row = r + [ZERO] * n_art + [b]
        if needs_art[i]:
            row[art] = mpq(1)
            basis.append(art)
            art += 1
        else:
            basis.append(slack_of_row[i])
        tab_rows.append(row)
    T = _Tableau(tab_rows, basis, ncols)

    if n_art:
        # phase one: maximise -sum(artificials)
        obj = [ZERO] * (ncols + 1)
        for k in range(nstruct + n_slack, ncols):
            obj[k] = mpq(-1)
        for i, bvar in enumerate(T.basis):
            if bvar >= nstruct + n_slack:
                row = T.rows[i]
                for k in range(ncols + 1):
                    obj[k] += row[k]
        T.run(obj, ncols)
        if obj[ncols] != 0:  # -(-sum art) = sum art > 0
            return LPResult("infeasible", pivots=T.pivots)
        # drive remaining zero-level artificials out of the basis
        keep = []
        for i in range(m):
            if T.basis[i] >= nstruct + n_slack:
                row = T.rows[i]
                j = next((k for k in range(nstruct + n_slack) if row[k] != 0), None)
                if j is None:
                    continue  # redundant row
                T.pivot(i, j, [ZERO] * (ncols + 1))
            keep.append(i)
        T.rows = [T.rows[i][:nstruct + n_slack] + [T.rows[i][ncols]] for i in keep]
        T.basis = [T.basis[i] for i in keep]
        T.ncols = nstruct + n_slack
    ncols = T.ncols

    obj = [ZERO] * (ncols + 1)
    for v, c in objective.items():
        k = idx[v]
        obj[2 * k] += to_mpq(c)
        obj[2 * k + 1] -= to_mpq(c)
    for i, bvar in enumerate(T.basis):
        cb = obj[bvar]
        if cb != 0:
            row = T.rows[i]
            for k in range(ncols + 1):
                obj[k] -= cb * row[k]
    status = T.run(obj, ncols)
    if status == "unbounded":
        return LPResult("unbounded", pivots=T.pivots)
    values = [ZERO] * ncols
    for i, bvar in enumerate(T.basis):
        values[bvar] = T.rows[i][ncols]
    x = {v: to_fraction(values[2 * k] - values[2 * k + 1]) for v, k in idx.items()}
    return LPResult("optimal", to_fraction(-obj[ncols]), x, T.pivots)
