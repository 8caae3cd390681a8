"""Weak equality: reduction of an expression modulo a set of constraints.

Constraints that are affine in a chart symbol with an invertible coefficient
(a constant times exponentials) are used as substitution rules.  What is left
is matched against the remaining constraints by solving a linear system for
undetermined monomial multipliers.  Every reduction carries a certificate:
``f - normal_form == sum(combination[k] * constraints[k])`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .expr import Expr, Num, Sym, Symbol, SymbolKind, canonical, is_zero, polynomial_coefficients
from .expr.nodes import Func
from .expr.normal import RatFunc, _mono_rf, _mono_sort_key, from_rf, rf_mul, to_rf

_ELIMINABLE = {
    SymbolKind.MOMENTUM: 0,
    SymbolKind.VELOCITY: 0,
    SymbolKind.ACCELERATION: 0,
    SymbolKind.COORDINATE: 1,
}


class UnsupportedReduction(ValueError):
    def __init__(self, message: str, constraint: Expr | None = None):
        self.constraint = constraint
        super().__init__(message)


@dataclass(frozen=True)
class Constraint:
    expr: Expr
    solved_for: Symbol | None = None
    origin: str = "primary"
    level: int = 0


@dataclass(frozen=True)
class ConstraintSet:
    side: str
    levels: tuple[tuple[Constraint, ...], ...] = ()
    # linear relations among free multipliers met during stabilization
    determinations: tuple[Expr, ...] = ()

    def all(self) -> list[Constraint]:
        return [c for lvl in self.levels for c in lvl]

    def exprs(self) -> list[Expr]:
        return [c.expr for c in self.all()]

    def level(self, n: int) -> list[Expr]:
        return [c.expr for c in self.levels[n]] if n < len(self.levels) else []

    def __len__(self):
        return len(self.all())


def make_constraint(expr: Expr, origin: str = "primary", level: int = 0) -> Constraint:
    found = solved_form(expr)
    return Constraint(expr, found[0] if found else None, origin, level)


def _is_unit(e: Expr) -> bool:
    r = to_rf(e)
    if len(r.num) != 1 or r.den:
        return False
    (mono, c), = r.num.items()
    return all(isinstance(a, Func) and a.name == "exp" for a, _ in mono)


def solved_form(expr: Expr, exclude: Iterable[Symbol] = ()) -> tuple[Symbol, Expr, Expr] | None:
    """Find s with expr == a*s + r, a invertible, s absent from a and r.

    Returns (s, a, r); momenta/velocities are preferred over coordinates.
    """
    excluded = set(exclude)
    cands = sorted((s for s in expr.free_symbols if s.kind in _ELIMINABLE and s not in excluded),
                   key=lambda s: (_ELIMINABLE[s.kind], s.name))
    for s in cands:
        co = polynomial_coefficients(expr, s)
        if co is None or set(co) - {0, 1} or 1 not in co:
            continue
        a, r = co[1], co.get(0, Num(0))
        if s in a.free_symbols or not _is_unit(a):
            continue
        return s, a, r
    return None


@dataclass
class Reduction:
    normal_form: Expr
    combination: list[Expr]
    matched: bool = True

    @property
    def is_zero(self) -> bool:
        return is_zero(self.normal_form)


@dataclass
class _Basis:
    expr: Expr
    coeffs: list[Expr]
    symbol: Symbol | None = None
    solution: Expr | None = None
    lead: Expr | None = None


def _divided_difference(co: dict[int, Expr], s: Expr, sol: Expr) -> Expr:
    """(f(s) - f(sol)) / (s - sol) for f = sum co[j] s^j."""
    out = Num(0)
    for j, c in co.items():
        for i in range(j):
            out = out + c * _ipow(s, i) * _ipow(sol, j - 1 - i)
    return out


def _ipow(e: Expr, k: int) -> Expr:
    return Num(1) if k == 0 else e**k


def _substitute_solved(e: Expr, solved: Sequence[_Basis]) -> tuple[Expr, list[Expr]]:
    qs = [Num(0)] * len(solved)
    for k, b in enumerate(solved):
        if b.symbol not in e.free_symbols:
            continue
        co = polynomial_coefficients(e, b.symbol)
        if co is None:
            continue
        new = sum((c * b.solution**j if j else c for j, c in co.items()), Num(0))
        qs[k] = _divided_difference(co, Sym(b.symbol), b.solution) / b.lead
        e = new
    return e, qs


def _combine(vectors: Sequence[list[Expr]], weights: Sequence[Expr], n: int) -> list[Expr]:
    out = [Num(0)] * n
    for w, vec in zip(weights, vectors):
        if w.is_literal_zero():
            continue
        for i, v in enumerate(vec):
            if not v.is_literal_zero():
                out[i] = out[i] + w * v
    return out


def _mono_quotient(m1, m2):
    r = _mono_rf(list(m1) + [(a, -e) for a, e in m2])
    if len(r.num) != 1 or r.den:
        return None
    (mono, _), = r.num.items()
    return mono


def _allowed(mono, degree: int) -> bool:
    total = Fraction(0)
    for a, e in mono:
        if isinstance(a, Func) and a.name == "exp":
            continue
        if e < 0:
            return False
        total += e
    return total <= degree


def solve_rational(columns: list[dict], rhs: dict) -> list[Fraction] | None:
    """Exact solution of sum_j x_j columns[j] == rhs over Q, or None."""
    rows: dict = {}
    for j, col in enumerate(columns):
        for key, v in col.items():
            rows.setdefault(key, [{}, Fraction(0)])[0][j] = v
    for key, v in rhs.items():
        rows.setdefault(key, [{}, Fraction(0)])[1] = v
    work = [r for r in rows.values() if r[0] or r[1]]
    pivots: list[tuple[int, list]] = []
    for row in work:
        coeffs, b = row
        for pj, prow in pivots:
            f = coeffs.get(pj)
            if f:
                for j, v in prow[0].items():
                    nv = coeffs.get(j, Fraction(0)) - f * v
                    if nv:
                        coeffs[j] = nv
                    else:
                        coeffs.pop(j, None)
                b -= f * prow[1]
        row[1] = b
        if not coeffs:
            if b:
                return None
            continue
        pj = min(coeffs)
        pv = coeffs[pj]
        for j in coeffs:
            coeffs[j] /= pv
        row[1] = b / pv
        for qj, qrow in pivots:
            f = qrow[0].get(pj)
            if f:
                for j, v in coeffs.items():
                    nv = qrow[0].get(j, Fraction(0)) - f * v
                    if nv:
                        qrow[0][j] = nv
                    else:
                        qrow[0].pop(j, None)
                qrow[1] -= f * row[1]
        pivots.append((pj, row))
    x = [Fraction(0)] * len(columns)
    for pj, row in pivots:
        x[pj] = row[1]
    return x


def _match(target: Expr, gens: Sequence[Expr], degree: int, cap: int) -> list[Expr] | None:
    """Multipliers c with target == sum c_j gens_j, from a monomial ansatz."""
    T = to_rf(target)
    if not T.num:
        return [Num(0)] * len(gens)
    G = [to_rf(g) for g in gens]
    live = [j for j, g in enumerate(G) if g.num]
    if not live:
        return None
    base: dict[int, set] = {}
    for j in live:
        cands = set()
        for mr in T.num:
            for mg in G[j].num:
                q = _mono_quotient(mr, mg)
                if q is not None and _allowed(q, degree):
                    cands.add(q)
        base[j] = cands
    shifts = set()
    for j in live:
        for k in live:
            for mh in G[k].num:
                for mg in G[j].num:
                    if mh != mg:
                        q = _mono_quotient(mh, mg)
                        if q is not None:
                            shifts.add(q)
    cands = {j: set(v) for j, v in base.items()}
    for _round in range(max(degree, 1)):
        sol = _solve_ansatz(T, G, cands)
        if sol is not None:
            return sol
        grown = False
        for j in live:
            extra = set()
            for s in cands[j]:
                for q in shifts:
                    m = _mono_quotient(s, tuple((a, -e) for a, e in q))
                    if m is not None and m not in cands[j] and _allowed(m, degree):
                        extra.add(m)
            if extra:
                cands[j] |= extra
                grown = True
        if sum(len(v) for v in cands.values()) > cap:
            raise UnsupportedReduction(
                f"coefficient-matching ansatz exceeded {cap} unknowns while reducing {target}")
        if not grown:
            break
    return None


def _solve_ansatz(T: RatFunc, G: list[RatFunc], cands: dict[int, set]) -> list[Expr] | None:
    unknowns = []
    columns = []
    for j in sorted(cands):
        for m in sorted(cands[j], key=_mono_sort_key):
            prod = rf_mul(RatFunc({m: Fraction(1)}), RatFunc(dict(G[j].num)))
            if prod.den:
                continue
            unknowns.append((j, m))
            columns.append(prod.num)
    x = solve_rational(columns, T.num)
    if x is None:
        return None
    polys: dict[int, dict] = {}
    for (j, m), v in zip(unknowns, x):
        if v:
            polys.setdefault(j, {})[m] = v
    out = [Num(0)] * len(G)
    t_den_inv = from_rf(RatFunc({(): Fraction(1)}, dict(T.den)))
    for j, poly in polys.items():
        c = from_rf(RatFunc(poly))
        g_den = from_rf(RatFunc({(): Fraction(1)}, dict(G[j].den)))
        # gens_j = N_j * g_den, target = N_T * t_den
        out[j] = canonical(c * t_den_inv / g_den)
    return out


def reduce_mod(f: Expr, constraints, ansatz_degree: int = 4, cap: int = 600) -> Reduction:
    """Normal form of ``f`` modulo the ideal generated by ``constraints``."""
    gs = constraints.exprs() if isinstance(constraints, ConstraintSet) else list(constraints)
    n = len(gs)
    solved: list[_Basis] = []
    pending: list[_Basis] = []
    eliminated: set = set()
    for k, g in enumerate(gs):
        unit = [Num(1) if i == k else Num(0) for i in range(n)]
        e, qs = _substitute_solved(g, solved)
        coeffs = [u - c for u, c in zip(unit, _combine([b.coeffs for b in solved], qs, n))]
        if is_zero(e):
            continue
        found = solved_form(e, eliminated)
        if found is not None:
            s, a, r = found
            solved.append(_Basis(e, coeffs, s, canonical(-r / a), a))
            eliminated.add(s)
        else:
            pending.append(_Basis(e, coeffs))
    for b in pending:
        e, qs = _substitute_solved(b.expr, solved)
        if any(not q.is_literal_zero() for q in qs):
            b.coeffs = [u - c for u, c in zip(b.coeffs, _combine([s.coeffs for s in solved], qs, n))]
            b.expr = e
    pending = [b for b in pending if not is_zero(b.expr)]

    fr, qs = _substitute_solved(f, solved)
    combination = _combine([b.coeffs for b in solved], qs, n)
    if is_zero(fr) or not pending:
        return Reduction(fr, combination, is_zero(fr))
    mult = _match(fr, [b.expr for b in pending], ansatz_degree, cap)
    if mult is None:
        return Reduction(fr, combination, False)
    extra = _combine([b.coeffs for b in pending], mult, n)
    combination = [a + b for a, b in zip(combination, extra)]
    return Reduction(Num(0), combination, True)


def weak_equals(f: Expr, g: Expr, constraints, ansatz_degree: int = 4) -> bool:
    return reduce_mod(f - g, constraints, ansatz_degree).is_zero


def certificate_residual(f: Expr, constraints, red: Reduction) -> Expr:
    gs = constraints.exprs() if isinstance(constraints, ConstraintSet) else list(constraints)
    total = red.normal_form
    for c, g in zip(red.combination, gs):
        total = total + c * g
    return f - total
