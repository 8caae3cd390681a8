"""Immutable expression trees.

Nodes compare and hash structurally.  The arithmetic operators always return
canonical expressions (see :mod:`noether_kit.expr.normal`); the raw node
constructors do not canonicalize and are meant for builders such as the
parser and the differentiator, which canonicalize once at the end.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .symbols import Symbol

FUNCTIONS = ("exp", "log", "sin", "cos")


class ExprError(ValueError):
    pass


class Expr:
    __slots__ = ("_hash", "_key", "_rf", "_free", "_size")
    RANK = -1

    def __init__(self):
        self._hash = None
        self._key = None
        self._rf = None
        self._free = None
        self._size = None

    # structural identity -------------------------------------------------
    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return self.__hash__() == other.__hash__() and self._fields() == other._fields()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._fields()))
        return self._hash

    @property
    def key(self) -> tuple:
        """Total order used to sort children of sums and products."""
        if self._key is None:
            self._key = self._make_key()
        return self._key

    def _make_key(self) -> tuple:
        raise NotImplementedError

    @property
    def args(self) -> tuple:
        return ()

    @property
    def free_symbols(self) -> frozenset:
        if self._free is None:
            out = set()
            for a in self.args:
                out |= a.free_symbols
            self._free = frozenset(out)
        return self._free

    @property
    def size(self) -> int:
        if self._size is None:
            self._size = 1 + sum(a.size for a in self.args)
        return self._size

    def has(self, *symbols: Symbol) -> bool:
        return any(s in self.free_symbols for s in symbols)

    # arithmetic (canonical) ----------------------------------------------
    def __add__(self, other):
        return _normal.add(self, as_expr(other))

    def __radd__(self, other):
        return _normal.add(as_expr(other), self)

    def __sub__(self, other):
        return _normal.add(self, _normal.neg(as_expr(other)))

    def __rsub__(self, other):
        return _normal.add(as_expr(other), _normal.neg(self))

    def __mul__(self, other):
        return _normal.mul(self, as_expr(other))

    def __rmul__(self, other):
        return _normal.mul(as_expr(other), self)

    def __truediv__(self, other):
        return _normal.div(self, as_expr(other))

    def __rtruediv__(self, other):
        return _normal.div(as_expr(other), self)

    def __pow__(self, exponent):
        return _normal.power(self, exponent)

    def __neg__(self):
        return _normal.neg(self)

    def __pos__(self):
        return self

    def __str__(self):
        from .printer import to_string

        return to_string(self)

    def __repr__(self):
        return f"Expr({str(self)!r})"

    @property
    def is_number(self) -> bool:
        return isinstance(self, Num)

    def is_literal_zero(self) -> bool:
        return isinstance(self, Num) and self.value == 0


class Num(Expr):
    __slots__ = ("value",)
    RANK = 0

    def __init__(self, value):
        super().__init__()
        self.value = Fraction(value)

    def _fields(self):
        return (self.value,)

    def _make_key(self):
        return (0, self.value)

    @property
    def free_symbols(self):
        return frozenset()


class Sym(Expr):
    __slots__ = ("symbol",)
    RANK = 1

    def __init__(self, symbol: Symbol):
        super().__init__()
        self.symbol = symbol

    def _fields(self):
        return (self.symbol,)

    def _make_key(self):
        return (1, self.symbol.name, self.symbol.kind.value)

    @property
    def free_symbols(self):
        return frozenset((self.symbol,))

    @property
    def name(self) -> str:
        return self.symbol.name


class Func(Expr):
    __slots__ = ("name", "arg")
    RANK = 2

    def __init__(self, name: str, arg: Expr):
        super().__init__()
        if name not in FUNCTIONS:
            raise ExprError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg

    def _fields(self):
        return (self.name, self.arg)

    def _make_key(self):
        return (2, self.name, self.arg.key)

    @property
    def args(self):
        return (self.arg,)


class Pow(Expr):
    __slots__ = ("base", "exponent")
    RANK = 3

    def __init__(self, base: Expr, exponent):
        super().__init__()
        self.base = base
        self.exponent = Fraction(exponent)

    def _fields(self):
        return (self.base, self.exponent)

    def _make_key(self):
        return (3, self.base.key, self.exponent)

    @property
    def args(self):
        return (self.base,)


class Mul(Expr):
    __slots__ = ("factors",)
    RANK = 4

    def __init__(self, factors: Iterable[Expr]):
        super().__init__()
        self.factors = tuple(factors)

    def _fields(self):
        return self.factors

    def _make_key(self):
        return (4, tuple(f.key for f in self.factors))

    @property
    def args(self):
        return self.factors


class Add(Expr):
    __slots__ = ("terms",)
    RANK = 5

    def __init__(self, terms: Iterable[Expr]):
        super().__init__()
        self.terms = tuple(terms)

    def _fields(self):
        return self.terms

    def _make_key(self):
        return (5, tuple(t.key for t in self.terms))

    @property
    def args(self):
        return self.terms


ZERO = Num(0)
ONE = Num(1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, Symbol):
        return Sym(value)
    if isinstance(value, (int, Fraction)):
        return Num(value)
    if isinstance(value, float):
        # exact binary value; the parser never produces floats
        return Num(Fraction(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


from . import normal as _normal  # noqa: E402  (circular by design)
