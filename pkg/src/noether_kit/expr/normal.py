"""Rational normal form.

Every expression is mapped to a :class:`RatFunc`: an expanded numerator
(a Laurent polynomial over *atoms* with rational coefficients) divided by a
product of normalized multi-term polynomials with multiplicities.  Atoms are

* symbols,
* ``exp``/``log``/``sin``/``cos`` applied to a canonical argument,
* a positive integer raised to an exponent in (0, 1) (numeric radicals),
* a normalized sum raised to an exponent in (0, 1) (sum radicals).

The rewrite table is applied while multiplying monomials::

    exp(a)*exp(b) -> exp(a + b)      exp(a)^r -> exp(r*a)     exp(0) -> 1
    log(exp(a))   -> a               exp(log(a)) -> a          log(1) -> 0
    sin(a)^2      -> 1 - cos(a)^2    sin(-a) -> -sin(a)        cos(-a) -> cos(a)
    sqrt(a)^2     -> a

Two expressions are equal under these rules iff their normal forms coincide,
so ``is_zero`` is a check for an empty numerator.  No polynomial gcd is taken,
which keeps the form canonical but not necessarily reduced.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from .nodes import Add, Expr, ExprError, Func, Mul, Num, Pow, Sym

F0 = Fraction(0)
F1 = Fraction(1)


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num=None, den=None):
        # num: {mono: Fraction}; den: {factor_key: (poly, multiplicity)}
        self.num = num if num is not None else {}
        self.den = den if den is not None else {}

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):  # pragma: no cover - not used as dict key
        return hash((frozenset(self.num.items()), frozenset(self.den.items())))


def _const(c) -> RatFunc:
    c = Fraction(c)
    return RatFunc({(): c} if c else {})


RF_ZERO = _const(0)
RF_ONE = _const(1)


def _poly_rf(poly) -> RatFunc:
    return RatFunc(dict(poly))


def _factor_key(poly):
    return frozenset(poly.items())


# -- monomial order --------------------------------------------------------

def _is_exp(atom) -> bool:
    return isinstance(atom, Func) and atom.name == "exp"


def _degree(mono) -> Fraction:
    return sum((e for a, e in mono if not _is_exp(a)), F0)


def _mono_cmp(m1, m2) -> int:
    """Graded lexicographic order; -1 means ``m1`` comes first."""
    d1, d2 = _degree(m1), _degree(m2)
    if d1 != d2:
        return -1 if d1 > d2 else 1
    a1 = [(a, e) for a, e in m1 if not _is_exp(a)]
    a2 = [(a, e) for a, e in m2 if not _is_exp(a)]
    i = j = 0
    while i < len(a1) or j < len(a2):
        if j >= len(a2) or (i < len(a1) and a1[i][0].key < a2[j][0].key):
            return -1 if a1[i][1] > 0 else 1
        if i >= len(a1) or a2[j][0].key < a1[i][0].key:
            return 1 if a2[j][1] > 0 else -1
        e1, e2 = a1[i][1], a2[j][1]
        if e1 != e2:
            return -1 if e1 > e2 else 1
        i += 1
        j += 1
    x1 = [a.key for a, _ in m1 if _is_exp(a)]
    x2 = [a.key for a, _ in m2 if _is_exp(a)]
    if x1 == x2:
        return 0
    return -1 if x1 < x2 else 1


_mono_sort_key = functools.cmp_to_key(_mono_cmp)


def sorted_terms(poly):
    return sorted(poly.items(), key=lambda kv: _mono_sort_key(kv[0]))


# -- monomials -------------------------------------------------------------

def _iroot(n: int, q: int):
    """Exact integer q-th root of n, or None."""
    if n < 2:
        return n
    r = int(round(n ** (1.0 / q)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**q == n:
            return cand
    return None


def _mono_normalize(entries):
    """Collect (atom, exponent) pairs into (coef, mono, extra_ratfuncs)."""
    exps: dict = {}
    exp_parts = []
    for atom, e in entries:
        if _is_exp(atom):
            exp_parts.append((atom.arg, e))
        else:
            exps[atom] = exps.get(atom, F0) + e
    coef = F1
    extras = []
    out = []
    for atom, e in exps.items():
        if e == 0:
            continue
        if isinstance(atom, Num):
            n = atom.value.numerator
            k = math.floor(e)
            f = e - k
            coef *= Fraction(n) ** k
            if f:
                r = _iroot(n, f.denominator)
                if r is not None:
                    coef *= Fraction(r) ** f.numerator
                else:
                    out.append((atom, f))
        elif isinstance(atom, Add):
            k = math.floor(e)
            f = e - k
            if k:
                extras.append(rf_pow(to_rf(atom), k))
            if f:
                out.append((atom, f))
        elif (isinstance(atom, Func) and atom.name == "sin"
              and e.denominator == 1 and e >= 2):
            k, r = divmod(int(e), 2)
            cos2 = _atom_rf(Func("cos", atom.arg), Fraction(2))
            extras.append(rf_pow(rf_add(RF_ONE, rf_neg(cos2)), k))
            if r:
                out.append((atom, F1))
        else:
            out.append((atom, e))
    if len(exp_parts) == 1 and exp_parts[0][1] == 1:
        out.append((Func("exp", exp_parts[0][0]), F1))
    elif exp_parts:
        arg = RF_ZERO
        for a, e in exp_parts:
            arg = rf_add(arg, rf_mul(_const(e), to_rf(a)))
        extras.append(exp_rf(arg))
    out.sort(key=lambda ae: ae[0].key)
    return coef, tuple(out), extras


def _atom_rf(atom, e=F1) -> RatFunc:
    return RatFunc({((atom, Fraction(e)),): F1})


def _fast_product(m1, m2):
    """Merge two monomials when no rewrite rule can fire; else None."""
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        if a in d:
            if not isinstance(a, Sym):
                return None
            s = d[a] + e
            if s:
                d[a] = s
            else:
                del d[a]
        else:
            if _is_exp(a) and any(_is_exp(b) for b in d):
                return None
            d[a] = e
    return tuple(sorted(d.items(), key=lambda ae: ae[0].key))


# -- polynomial / rational arithmetic --------------------------------------

def _poly_add_into(acc, poly, scale=F1):
    for m, c in poly.items():
        v = acc.get(m, F0) + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def _poly_mul(p, q) -> RatFunc:
    acc: dict = {}
    pending = []
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _fast_product(m1, m2)
            if m is not None:
                v = acc.get(m, F0) + c1 * c2
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
                continue
            coef, m, extras = _mono_normalize(m1 + m2)
            c = c1 * c2 * coef
            if not extras:
                v = acc.get(m, F0) + c
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
            else:
                r = RatFunc({m: c})
                for x in extras:
                    r = rf_mul(r, x)
                pending.append(r)
    out = RatFunc(acc)
    for r in pending:
        out = rf_add(out, r)
    return out


def _merge_den(*dens):
    out: dict = {}
    for den in dens:
        for k, (poly, mult) in den.items():
            if k in out:
                out[k] = (poly, out[k][1] + mult)
            else:
                out[k] = (poly, mult)
    return out


def rf_neg(a: RatFunc) -> RatFunc:
    return RatFunc({m: -c for m, c in a.num.items()}, dict(a.den))


def _expand_den(den, mults) -> RatFunc:
    r = RF_ONE
    for k, extra in mults.items():
        if extra:
            r = rf_mul(r, rf_pow(_poly_rf(den[k][0]), extra))
    return r


def rf_add(a: RatFunc, b: RatFunc) -> RatFunc:
    if not a.num:
        return b
    if not b.num:
        return a
    if a.den == b.den:
        acc = dict(a.num)
        _poly_add_into(acc, b.num)
        return RatFunc(acc, dict(a.den) if acc else {})
    keys = set(a.den) | set(b.den)
    den = {}
    for k in keys:
        ma = a.den.get(k, (None, 0))[1]
        mb = b.den.get(k, (None, 0))[1]
        poly = (a.den.get(k) or b.den.get(k))[0]
        den[k] = (poly, max(ma, mb))
    na = rf_mul(RatFunc(a.num), _expand_den(den, {k: den[k][1] - a.den.get(k, (None, 0))[1] for k in keys}))
    nb = rf_mul(RatFunc(b.num), _expand_den(den, {k: den[k][1] - b.den.get(k, (None, 0))[1] for k in keys}))
    s = rf_add(na, nb)
    if not s.num:
        return RF_ZERO
    return RatFunc(s.num, _merge_den(s.den, den))


def rf_mul(a: RatFunc, b: RatFunc) -> RatFunc:
    if not a.num or not b.num:
        return RF_ZERO
    prod = _poly_mul(a.num, b.num)
    if not prod.num:
        return RF_ZERO
    return RatFunc(prod.num, _merge_den(prod.den, a.den, b.den))


def _normalize_factor(poly):
    """Split a multi-term polynomial into coef * content * primitive part.

    The primitive part has leading coefficient 1 and no common power of a
    non-exponential atom.  Exponential atoms are left in place.
    """
    atoms = set()
    for m in poly:
        for a, _ in m:
            if not _is_exp(a):
                atoms.add(a)
    content = {}
    for a in atoms:
        low = None
        for m in poly:
            e = dict(m).get(a, F0)
            low = e if low is None else min(low, e)
        if low:
            content[a] = low
    lead_mono, lead_coef = sorted_terms(poly)[0]
    prim = {}
    for m, c in poly.items():
        if content:
            d = dict(m)
            for a, e in content.items():
                v = d.get(a, F0) - e
                if v:
                    d[a] = v
                else:
                    d.pop(a, None)
            m = tuple(sorted(d.items(), key=lambda ae: ae[0].key))
        prim[m] = c / lead_coef
    content_mono = tuple(sorted(content.items(), key=lambda ae: ae[0].key))
    return lead_coef, content_mono, prim


def _mono_rf(entries, coef=F1) -> RatFunc:
    c, m, extras = _mono_normalize(entries)
    r = RatFunc({m: c * coef}) if c * coef else RF_ZERO
    for x in extras:
        r = rf_mul(r, x)
    return r


def rf_inverse(a: RatFunc) -> RatFunc:
    if not a.num:
        raise ExprError("division by zero")
    back = RF_ONE
    for poly, mult in a.den.values():
        back = rf_mul(back, rf_pow(_poly_rf(poly), mult))
    if len(a.num) == 1:
        (m, c), = a.num.items()
        inv = _mono_rf([(x, -e) for x, e in m], F1 / c)
    else:
        c, content, prim = _normalize_factor(a.num)
        inv = _mono_rf([(x, -e) for x, e in content], F1 / c)
        inv = rf_mul(inv, RatFunc({(): F1}, {_factor_key(prim): (prim, 1)}))
    return rf_mul(back, inv)


def _rf_root(a: RatFunc, f: Fraction) -> RatFunc:
    """a^f for 0 < f < 1, principal branch on the positive domain."""
    if not a.num:
        return RF_ZERO
    entries = []
    if len(a.num) == 1:
        (m, c), = a.num.items()
        if c < 0:
            raise ExprError("fractional power of a negative quantity")
        entries.extend((x, e * f) for x, e in m)
    else:
        c, content, prim = _normalize_factor(a.num)
        if c < 0:
            c = -c
            prim = {m: -v for m, v in prim.items()}
        entries.extend((x, e * f) for x, e in content)
        entries.append((_poly_to_expr(prim), f))
    if c.numerator != 1:
        entries.append((Num(c.numerator), f))
    if c.denominator != 1:
        entries.append((Num(c.denominator), -f))
    for poly, mult in a.den.values():
        entries.append((_poly_to_expr(poly), -mult * f))
    return _mono_rf(entries)


def rf_pow(a: RatFunc, e) -> RatFunc:
    e = Fraction(e)
    if e.denominator == 1:
        n = int(e)
        if n == 0:
            if not a.num:
                raise ExprError("0^0 is undefined")
            return RF_ONE
        if n < 0:
            return rf_pow(rf_inverse(a), -n)
        result = RF_ONE
        base = a
        while n:
            if n & 1:
                result = rf_mul(result, base)
            n >>= 1
            if n:
                base = rf_mul(base, base)
        return result
    k = math.floor(e)
    f = e - k
    if not a.num:
        if e < 0:
            raise ExprError("division by zero")
        return RF_ZERO
    return rf_mul(rf_pow(a, k), _rf_root(a, f))


# -- elementary functions --------------------------------------------------

def _leading_negative(a: RatFunc) -> bool:
    return bool(a.num) and sorted_terms(a.num)[0][1] < 0


def exp_rf(arg: RatFunc) -> RatFunc:
    if not arg.num:
        return RF_ONE
    e = from_rf(arg)
    if isinstance(e, Func) and e.name == "log":
        return to_rf(e.arg)
    return _atom_rf(Func("exp", e))


def log_rf(arg: RatFunc) -> RatFunc:
    e = from_rf(arg)
    if isinstance(e, Num):
        if e.value <= 0:
            raise ExprError(f"log of non-positive constant {e.value}")
        if e.value == 1:
            return RF_ZERO
    if isinstance(e, Func) and e.name == "exp":
        return to_rf(e.arg)
    return _atom_rf(Func("log", e))


def sin_rf(arg: RatFunc) -> RatFunc:
    if not arg.num:
        return RF_ZERO
    if _leading_negative(arg):
        return rf_neg(_atom_rf(Func("sin", from_rf(rf_neg(arg)))))
    return _atom_rf(Func("sin", from_rf(arg)))


def cos_rf(arg: RatFunc) -> RatFunc:
    if not arg.num:
        return RF_ONE
    if _leading_negative(arg):
        arg = rf_neg(arg)
    return _atom_rf(Func("cos", from_rf(arg)))


_FUNC_RF = {"exp": exp_rf, "log": log_rf, "sin": sin_rf, "cos": cos_rf}


# -- conversion ------------------------------------------------------------

def to_rf(e: Expr) -> RatFunc:
    if e._rf is not None:
        return e._rf
    if isinstance(e, Num):
        r = _const(e.value)
    elif isinstance(e, Sym):
        r = _atom_rf(e)
    elif isinstance(e, Add):
        r = RF_ZERO
        for t in e.terms:
            r = rf_add(r, to_rf(t))
    elif isinstance(e, Mul):
        r = RF_ONE
        for f in e.factors:
            r = rf_mul(r, to_rf(f))
            if not r.num:
                break
    elif isinstance(e, Pow):
        if e.exponent < 0 and e.exponent.denominator == 1:
            r = _inverse_power(e.base, int(-e.exponent))
        else:
            r = rf_pow(to_rf(e.base), e.exponent)
    elif isinstance(e, Func):
        r = _FUNC_RF[e.name](to_rf(e.arg))
    else:  # pragma: no cover
        raise ExprError(f"unknown node {type(e).__name__}")
    e._rf = r
    return r


def _inverse_power(b: Expr, k: int) -> RatFunc:
    # invert factor by factor so that 1/(a)^k keeps (a) as a denominator
    # factor of multiplicity k, exactly as the printer emits it
    if isinstance(b, Pow) and b.exponent.denominator == 1 and b.exponent > 0:
        return _inverse_power(b.base, k * int(b.exponent))
    if isinstance(b, Mul):
        r = RF_ONE
        for f in b.factors:
            r = rf_mul(r, _inverse_power(f, k))
        return r
    return rf_pow(rf_inverse(to_rf(b)), k)


def _term_expr(c: Fraction, mono) -> Expr:
    factors = [a if e == 1 else Pow(a, e) for a, e in mono]
    if c != 1 or not factors:
        factors.insert(0, Num(c))
    return factors[0] if len(factors) == 1 else Mul(factors)


def _poly_to_expr(poly) -> Expr:
    terms = [_term_expr(c, m) for m, c in sorted_terms(poly)]
    if not terms:
        return Num(0)
    return terms[0] if len(terms) == 1 else Add(terms)


def from_rf(r: RatFunc) -> Expr:
    n = _poly_to_expr(r.num)
    if not r.den or not r.num:
        out = n
    else:
        dens = sorted((Pow(_poly_to_expr(p), -k) for p, k in r.den.values()), key=lambda x: x.key)
        if isinstance(n, Mul):
            factors = list(n.factors)
        elif isinstance(n, Num) and n.value == 1:
            factors = []
        else:
            factors = [n]
        coef = []
        if factors and isinstance(factors[0], Num):
            coef = [factors.pop(0)]
        factors = coef + sorted(factors + dens, key=lambda x: x.key)
        out = factors[0] if len(factors) == 1 else Mul(factors)
    out._rf = r
    return out


# -- public API ------------------------------------------------------------

def canonical(e: Expr) -> Expr:
    return from_rf(to_rf(e))


def is_zero(e: Expr) -> bool:
    return not to_rf(e).num


def add(a: Expr, b: Expr) -> Expr:
    return from_rf(rf_add(to_rf(a), to_rf(b)))


def mul(a: Expr, b: Expr) -> Expr:
    return from_rf(rf_mul(to_rf(a), to_rf(b)))


def neg(a: Expr) -> Expr:
    return from_rf(rf_neg(to_rf(a)))


def div(a: Expr, b: Expr) -> Expr:
    return from_rf(rf_mul(to_rf(a), rf_inverse(to_rf(b))))


def power(a: Expr, exponent) -> Expr:
    if isinstance(exponent, Expr):
        exponent = canonical(exponent)
        if not isinstance(exponent, Num):
            raise ExprError("exponents must be rational constants")
        exponent = exponent.value
    return from_rf(rf_pow(to_rf(a), Fraction(exponent)))


def apply_function(name: str, arg: Expr) -> Expr:
    if name == "sqrt":
        return power(arg, Fraction(1, 2))
    if name not in _FUNC_RF:
        raise ExprError(f"unknown function {name!r}")
    return from_rf(_FUNC_RF[name](to_rf(arg)))


def numerator_terms(e: Expr):
    """(coef, mono) pairs of the numerator in canonical order."""
    return sorted_terms(to_rf(e).num)


def denominator(e: Expr) -> Expr:
    r = to_rf(e)
    if not r.den:
        return Num(1)
    return from_rf(RatFunc({(): F1}, {})) if not r.num else from_rf(
        rf_inverse(RatFunc({(): F1}, dict(r.den))))


def numerator(e: Expr) -> Expr:
    return from_rf(RatFunc(dict(to_rf(e).num)))


def term_expr(coef, mono) -> Expr:
    return from_rf(RatFunc({mono: Fraction(coef)}))


def mono_atoms(mono):
    return [a for a, _ in mono]
