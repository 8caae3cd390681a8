"""Infix printer whose output re-parses to the same canonical expression."""

from __future__ import annotations

from fractions import Fraction

from .nodes import Add, Expr, Func, Mul, Num, Pow, Sym

_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


def _num(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _wrap(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _exponent(e: Fraction) -> str:
    if e.denominator == 1 and e > 0:
        return str(e.numerator)
    return f"({_num(e)})"


def _render(e: Expr) -> tuple[str, int]:
    """Return (text, precedence of the outermost operator)."""
    if isinstance(e, Num):
        v = e.value
        if v < 0:
            return "-" + _num(-v), _NEG
        return _num(v), (_ATOM if v.denominator == 1 else _MUL)
    if isinstance(e, Sym):
        return e.name, _ATOM
    if isinstance(e, Func):
        return f"{e.name}({_render(e.arg)[0]})", _ATOM
    if isinstance(e, Pow):
        if e.exponent < 0:
            return _render(Mul((e,)))
        if e.exponent == Fraction(1, 2):
            return f"sqrt({_render(e.base)[0]})", _ATOM
        base, prec = _render(e.base)
        return f"{_wrap(base, prec, _POW + 1)}^{_exponent(e.exponent)}", _POW
    if isinstance(e, Mul):
        return _render_mul(e.factors)
    if isinstance(e, Add):
        return _render_add(e.terms)
    raise TypeError(type(e).__name__)  # pragma: no cover


def _render_mul(factors) -> tuple[str, int]:
    coef = Fraction(1)
    num: list[tuple[str, int]] = []
    den: list[str] = []
    for f in factors:
        if isinstance(f, Num):
            coef *= f.value
            continue
        if isinstance(f, Pow) and f.exponent < 0:
            inv = f.base if f.exponent == -1 else Pow(f.base, -f.exponent)
            s, p = _render(inv)
            den.append(_wrap(s, p, _POW))
            continue
        num.append(_render(f))
    neg = coef < 0
    coef = abs(coef)
    if coef.numerator != 1 or not num:
        num.insert(0, (str(coef.numerator), _ATOM))
    if coef.denominator != 1:
        den.insert(0, str(coef.denominator))
    if len(num) == 1 and not den and not neg:
        return num[0]
    text = "*".join(_wrap(s, p, _MUL + 1) for s, p in num)
    for d in den:
        text += "/" + d
    if neg:
        return "-" + text, _NEG
    return text, _MUL


def _is_negative(e: Expr) -> bool:
    if isinstance(e, Num):
        return e.value < 0
    if isinstance(e, Mul):
        c = Fraction(1)
        for f in e.factors:
            if isinstance(f, Num):
                c *= f.value
        return c < 0
    return False


def _negate_term(e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(-e.value)
    return Mul(tuple(Num(-f.value) if isinstance(f, Num) else f for f in e.factors))


def _render_add(terms) -> tuple[str, int]:
    parts: list[str] = []
    for i, t in enumerate(terms):
        if i and _is_negative(t):
            s, p = _render(_negate_term(t))
            parts.append(" - " + _wrap(s, p, _MUL))
        else:
            s, p = _render(t)
            parts.append((" + " if i else "") + _wrap(s, p, _ADD + 1 if i else _ADD))
    return "".join(parts), _ADD


def to_string(e: Expr) -> str:
    return _render(e)[0]
