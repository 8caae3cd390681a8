"""Exact linear algebra over Expr-valued rational functions.

Elimination divides only by monomial pivots (an invertible Laurent
monomial, e.g. ``2*exp(-w)``); any other pivot is handled by cross
multiplication, so no new denominators appear during elimination.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .expr import Expr, Num, as_expr, canonical
from .expr.nodes import Func
from .expr.normal import is_zero as _exact_zero, to_rf, RatFunc, from_rf, rf_pow


class RankWarning(UserWarning):
    """A pivot is not identically zero but may vanish on a sub-locus."""


class InconsistentSystem(ValueError):
    def __init__(self, residuals: list[Expr]):
        self.residuals = residuals
        super().__init__("inconsistent linear system; residual conditions: "
                         + ", ".join(str(r) for r in residuals))


class SymMatrix:
    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(canonical(as_expr(x)) for x in r) for r in rows)
        widths = {len(r) for r in data}
        if len(widths) > 1:
            raise ValueError("matrix rows have different lengths")
        self._rows = data
        self.nrows = len(data)
        self.ncols = widths.pop() if widths else (ncols or 0)

    @classmethod
    def zeros(cls, n: int, m: int) -> "SymMatrix":
        return cls([[0] * m for _ in range(n)], ncols=m)

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    def __getitem__(self, ij) -> Expr:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Expr, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Expr, ...]:
        return tuple(r[j] for r in self._rows)

    @property
    def rows(self) -> tuple[tuple[Expr, ...], ...]:
        return self._rows

    @property
    def T(self) -> "SymMatrix":
        return SymMatrix([self.col(j) for j in range(self.ncols)], ncols=self.nrows)

    def apply(self, vec: Sequence[Expr]) -> list[Expr]:
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        out = []
        for r in self._rows:
            acc = Num(0)
            for a, v in zip(r, vec):
                if not a.is_literal_zero():
                    acc = acc + a * v
            out.append(acc)
        return out

    def __matmul__(self, other: "SymMatrix") -> "SymMatrix":
        return matmul(self, other)

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and self._rows == other._rows

    def __repr__(self):
        return "SymMatrix([" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self._rows) + "])"


def matmul(a: SymMatrix, b: SymMatrix) -> SymMatrix:
    if a.ncols != b.nrows:
        raise ValueError("dimension mismatch")
    rows = []
    for i in range(a.nrows):
        rows.append([sum((a[i, k] * b[k, j] for k in range(a.ncols)), Num(0))
                     for j in range(b.ncols)])
    return SymMatrix(rows, ncols=b.ncols)


@dataclass
class NullBasis:
    vectors: list[list[Expr]]
    rank: int
    # (row, column, pivot expression) in elimination order
    assumed_rank_witness: list[tuple[int, int, Expr]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.vectors)


@dataclass
class LinearSolution:
    particular: list[Expr]
    homogeneous: NullBasis
    # residual compatibility conditions (only in compatibility mode)
    conditions: list[Expr] = field(default_factory=list)


def _is_unit_monomial(e: Expr) -> bool:
    """Invertible everywhere on the chart: a constant times exponentials."""
    r = to_rf(e)
    if len(r.num) != 1 or r.den:
        return False
    (mono, c), = r.num.items()
    return c != 0 and all(isinstance(a, Func) and a.name == "exp" for a, _ in mono)


def _is_monomial(e: Expr) -> bool:
    r = to_rf(e)
    return len(r.num) == 1 and not r.den


def _pivot_rank(e: Expr) -> tuple:
    const = isinstance(e, Num)
    return (0 if const else 1 if _is_unit_monomial(e) else 2, e.size, e.key)


class _Eliminator:
    def __init__(self, rows: list[list[Expr]], ncols: int):
        self.rows = rows
        self.ncols = ncols
        self.pivots: list[tuple[int, int, Expr]] = []
        self.warnings: list[str] = []

    def run(self) -> None:
        r = 0
        n = len(self.rows)
        for c in range(self.ncols):
            cands = [i for i in range(r, n) if not _exact_zero(self.rows[i][c])]
            if not cands:
                continue
            best = min(cands, key=lambda i: _pivot_rank(self.rows[i][c]))
            self.rows[r], self.rows[best] = self.rows[best], self.rows[r]
            piv = self.rows[r][c]
            if not _is_unit_monomial(piv):
                msg = f"pivot {piv} is not identically zero but may vanish on a sub-locus"
                self.warnings.append(msg)
                warnings.warn(msg, RankWarning, stacklevel=3)
            if _is_monomial(piv):
                inv = 1 / piv
                self.rows[r] = [canonical(x * inv) if not x.is_literal_zero() else x
                                for x in self.rows[r]]
                piv = Num(1)
            self.pivots.append((r, c, self.rows[r][c]))
            for i in range(n):
                if i == r:
                    continue
                a = self.rows[i][c]
                if _exact_zero(a):
                    continue
                if isinstance(piv, Num) and piv.value == 1:
                    self.rows[i] = [x - a * y for x, y in zip(self.rows[i], self.rows[r])]
                else:
                    self.rows[i] = [piv * x - a * y for x, y in zip(self.rows[i], self.rows[r])]
            r += 1
            if r == n:
                break


def _clear_denominators(vec: list[Expr]) -> list[Expr]:
    dens: dict = {}
    for v in vec:
        for key, (poly, mult) in to_rf(v).den.items():
            if dens.get(key, (None, 0))[1] < mult:
                dens[key] = (poly, mult)
    if not dens:
        return vec
    scale = from_rf(RatFunc({(): 1}))
    for poly, mult in dens.values():
        scale = scale * from_rf(rf_pow(RatFunc(dict(poly)), mult))
    return [canonical(v * scale) for v in vec]


def _eliminate(M: SymMatrix) -> _Eliminator:
    el = _Eliminator([list(r) for r in M.rows], M.ncols)
    el.run()
    return el


def _null_from(el: _Eliminator, ncols: int) -> list[list[Expr]]:
    pivot_cols = {c: (r, p) for r, c, p in el.pivots}
    vectors = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        v = [Num(0)] * ncols
        v[f] = Num(1)
        for c, (r, _) in pivot_cols.items():
            entry = el.rows[r][f]
            if not _exact_zero(entry):
                v[c] = canonical(-entry / el.rows[r][c])
        vectors.append(_clear_denominators(v))
    return vectors


def null_space(M: SymMatrix) -> NullBasis:
    """Right kernel basis; one vector per non-pivot column."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        el = _eliminate(M)
    for w in el.warnings:
        warnings.warn(w, RankWarning, stacklevel=2)
    return NullBasis(_null_from(el, M.ncols), len(el.pivots), list(el.pivots), list(el.warnings))


def rank(M: SymMatrix) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        return len(_eliminate(M).pivots)


def solve_linear(M: SymMatrix, b: Sequence, compatibility: bool = False) -> LinearSolution:
    """General solution of M x = b.

    With ``compatibility=True`` the residual equations that do not involve
    any unknown are returned in ``conditions`` instead of raising.
    """
    b = [canonical(as_expr(x)) for x in b]
    if len(b) != M.nrows:
        raise ValueError("dimension mismatch")
    aug = SymMatrix([list(r) + [bi] for r, bi in zip(M.rows, b)], ncols=M.ncols + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        el = _Eliminator([list(r) for r in aug.rows], aug.ncols)
        # never pivot on the right-hand side column
        el.ncols = M.ncols
        el.run()
    for w in el.warnings:
        warnings.warn(w, RankWarning, stacklevel=2)
    used = {r for r, _, _ in el.pivots}
    conditions = [el.rows[i][-1] for i in range(len(el.rows))
                  if i not in used and not _exact_zero(el.rows[i][-1])]
    if conditions and not compatibility:
        raise InconsistentSystem(conditions)
    x = [Num(0)] * M.ncols
    for r, c, _ in el.pivots:
        x[c] = canonical(el.rows[r][-1] / el.rows[r][c])
    homogeneous = NullBasis(_null_from(el, M.ncols), len(el.pivots), list(el.pivots),
                            list(el.warnings))
    return LinearSolution(x, homogeneous, conditions)
