"""Differentiation, substitution and coefficient extraction."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .nodes import Add, Expr, ExprError, Func, Mul, Num, Pow, Sym, ZERO, as_expr
from .normal import canonical, from_rf, sorted_terms, to_rf, RatFunc
from .symbols import Symbol


class SubstitutionCycle(ExprError):
    pass


def _d(e: Expr, s: Symbol, memo: dict) -> Expr:
    """Raw (non-canonical) derivative tree."""
    if s not in e.free_symbols:
        return ZERO
    hit = memo.get(id(e))
    if hit is not None:
        return hit[1]
    if isinstance(e, Sym):
        out = Num(1)
    elif isinstance(e, Add):
        out = Add(tuple(_d(t, s, memo) for t in e.terms if s in t.free_symbols))
    elif isinstance(e, Mul):
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            if s in f.free_symbols:
                parts.append(Mul(fs[:i] + (_d(f, s, memo),) + fs[i + 1:]))
        out = Add(tuple(parts))
    elif isinstance(e, Pow):
        out = Mul((Num(e.exponent), Pow(e.base, e.exponent - 1), _d(e.base, s, memo)))
    elif isinstance(e, Func):
        da = _d(e.arg, s, memo)
        if e.name == "exp":
            out = Mul((e, da))
        elif e.name == "log":
            out = Mul((Pow(e.arg, -1), da))
        elif e.name == "sin":
            out = Mul((Func("cos", e.arg), da))
        else:
            out = Mul((Num(-1), Func("sin", e.arg), da))
    else:  # pragma: no cover
        raise ExprError(type(e).__name__)
    memo[id(e)] = (e, out)
    return out


def diff(e: Expr, s: Symbol) -> Expr:
    """Exact partial derivative; every symbol is an independent variable."""
    if s not in e.free_symbols:
        return Num(0)
    return canonical(_d(e, s, {}))


def _replace(e: Expr, table: Mapping[Symbol, Expr], memo: dict) -> Expr:
    if not (e.free_symbols & table.keys()):
        return e
    hit = memo.get(id(e))
    if hit is not None:
        return hit[1]
    if isinstance(e, Sym):
        out = table[e.symbol]
    elif isinstance(e, Add):
        out = Add(tuple(_replace(t, table, memo) for t in e.terms))
    elif isinstance(e, Mul):
        out = Mul(tuple(_replace(f, table, memo) for f in e.factors))
    elif isinstance(e, Pow):
        out = Pow(_replace(e.base, table, memo), e.exponent)
    elif isinstance(e, Func):
        out = Func(e.name, _replace(e.arg, table, memo))
    else:
        out = e
    memo[id(e)] = (e, out)
    return out


def _check_acyclic(bindings: Mapping[Symbol, Expr]) -> None:
    state: dict = {}

    def visit(s, path):
        st = state.get(s)
        if st == 1:
            cycle = " -> ".join(x.name for x in path + [s])
            raise SubstitutionCycle(f"cycle in substitution bindings: {cycle}")
        if st == 2 or s not in bindings:
            return
        state[s] = 1
        for t in sorted(bindings[s].free_symbols):
            visit(t, path + [s])
        state[s] = 2

    for s in sorted(bindings):
        visit(s, [])


def substitute(e: Expr, bindings: Mapping[Symbol, object]) -> Expr:
    """Simultaneous substitution followed by canonicalization.

    Bindings are applied once, simultaneously; a binding whose right-hand
    side mentions a bound symbol (directly or through a chain) is rejected
    as a cycle.
    """
    table = {s: as_expr(v) for s, v in bindings.items()}
    if not table:
        return e
    _check_acyclic(table)
    if not (e.free_symbols & table.keys()):
        return e
    return canonical(_replace(e, table, {}))


def substitute_sequential(e: Expr, bindings: list[tuple[Symbol, Expr]]) -> Expr:
    """Apply bindings one after another (later ones see earlier results)."""
    for s, v in bindings:
        if s in e.free_symbols:
            e = canonical(_replace(e, {s: v}, {}))
    return e


def _depends_inside_atom(mono, s: Symbol) -> bool:
    for a, _ in mono:
        if not isinstance(a, Sym) and s in a.free_symbols:
            return True
    return False


def polynomial_coefficients(e: Expr, s: Symbol) -> dict[int, Expr] | None:
    """Coefficients of ``e`` as a polynomial in ``s`` with nonnegative integer powers.

    Returns ``None`` when ``e`` is not polynomial in ``s`` (``s`` inside a
    denominator, a function, a radical, or with a negative/fractional power).
    """
    r = to_rf(e)
    for poly, _ in r.den.values():
        for m in poly:
            if any(s in a.free_symbols for a, _ in m):
                return None
    groups: dict[int, dict] = {}
    for m, c in r.num.items():
        if _depends_inside_atom(m, s):
            return None
        k = 0
        rest = []
        for a, x in m:
            if isinstance(a, Sym) and a.symbol == s:
                if x.denominator != 1 or x < 0:
                    return None
                k = int(x)
            else:
                rest.append((a, x))
        groups.setdefault(k, {})[tuple(rest)] = c
    out = {}
    for k, poly in groups.items():
        out[k] = from_rf(RatFunc(poly, dict(r.den)))
    return out


def is_linear_in(e: Expr, symbols) -> bool:
    for s in symbols:
        co = polynomial_coefficients(e, s)
        if co is None or any(k > 1 for k in co):
            return False
        if 1 in co and any(t in co[1].free_symbols for t in symbols):
            return False
    return True


def linear_coefficients(e: Expr, symbols) -> tuple[dict[Symbol, Expr], Expr] | None:
    """Split e = sum c_s * s + rest with c_s, rest free of ``symbols``."""
    coeffs = {}
    rest = e
    for s in symbols:
        co = polynomial_coefficients(rest, s)
        if co is None or any(k > 1 for k in co):
            return None
        if 1 in co:
            coeffs[s] = co[1]
        rest = co.get(0, Num(0))
    if any(rest.has(s) for s in symbols):
        return None
    if any(c.has(*symbols) for c in coeffs.values()):
        return None
    return coeffs, rest


def split_terms(e: Expr, keep) -> tuple[Expr, Expr]:
    """Split the numerator terms of ``e`` by ``keep(free_symbols_of_term)``.

    Returns (kept, rest) with kept + rest == e, both over e's denominator.
    """
    r = to_rf(e)
    kept, rest = {}, {}
    for m, c in r.num.items():
        syms = set()
        for a, _ in m:
            syms |= a.free_symbols
        (kept if keep(syms) else rest)[m] = c
    den_syms = set()
    for poly, _ in r.den.values():
        for m in poly:
            for a, _ in m:
                den_syms |= a.free_symbols
    if r.den and not keep(den_syms):
        # a denominator outside the kept class taints every term
        return Num(0), e
    return from_rf(RatFunc(kept, dict(r.den) if kept else {})), from_rf(
        RatFunc(rest, dict(r.den) if rest else {}))


def expr_terms(e: Expr) -> list[Expr]:
    """Numerator terms of e, each divided by e's denominator."""
    r = to_rf(e)
    return [from_rf(RatFunc({m: c}, dict(r.den))) for m, c in sorted_terms(r.num)]


def monomial_content(e: Expr) -> Fraction:
    r = to_rf(e)
    return sorted_terms(r.num)[0][1] if r.num else Fraction(0)
