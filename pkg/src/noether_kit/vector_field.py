"""Vector fields on R x TQ and R x T*Q with symbolic free parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .expr import Expr, Num, Sym, Symbol, SymbolKind, diff, free_derivative, gauge_symbol, is_zero
from .expr.symbols import TIME

_PARAM_KINDS = (SymbolKind.FREE, SymbolKind.FREE_DERIVATIVE)


class Space(str, Enum):
    TANGENT = "RxTQ"
    COTANGENT = "RxT*Q"


class SpaceMismatch(ValueError):
    pass


def time_partial(f: Expr) -> Expr:
    """Partial time derivative, including the formal rule d/dt eps^(n) = eps^(n+1)."""
    out = diff(f, TIME)
    for s in sorted(f.free_symbols):
        if s.kind is SymbolKind.GAUGE:
            out = out + _gauge_next(s) * diff(f, s)
    return out


def _gauge_next(s: Symbol) -> Expr:
    return Sym(gauge_symbol(s.base, s.order + 1))


@dataclass(frozen=True)
class VectorField:
    """sum_z components[z] * d/dz over a chart; the TIME component carries d/dt.

    ``name`` labels the opaque atoms ``D_<name>_<param>`` that stand for the
    action of this field on free parameters of other fields.
    """

    space: Space
    components: Mapping[Symbol, Expr]
    name: str = "V"
    free_parameters: tuple[Symbol, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "components",
                           {s: e for s, e in self.components.items() if not e.is_literal_zero()})

    def component(self, s: Symbol) -> Expr:
        return self.components.get(s, Num(0))

    def apply(self, f: Expr) -> Expr:
        out = Num(0)
        for s, c in self.components.items():
            if s == TIME:
                d = time_partial(f)
            elif s in f.free_symbols:
                d = diff(f, s)
            else:
                continue
            if not d.is_literal_zero():
                out = out + c * d
        for s in sorted(f.free_symbols):
            if s.kind in _PARAM_KINDS:
                out = out + _param_atom(self.name, s) * diff(f, s)
        return out

    def __call__(self, f: Expr) -> Expr:
        return self.apply(f)

    def scaled(self, c: Expr) -> "VectorField":
        return VectorField(self.space, {s: c * e for s, e in self.components.items()},
                           self.name, self.free_parameters)

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.space is not self.space:
            raise SpaceMismatch(f"{self.space.value} vs {other.space.value}")
        comps = dict(self.components)
        for s, e in other.components.items():
            comps[s] = comps.get(s, Num(0)) + e
        params = tuple(dict.fromkeys(self.free_parameters + other.free_parameters))
        return VectorField(self.space, comps, self.name, params)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scaled(Num(-1))

    def is_zero(self) -> bool:
        return all(is_zero(e) for e in self.components.values())

    def renamed(self, name: str) -> "VectorField":
        return VectorField(self.space, self.components, name, self.free_parameters)


def _param_atom(field_name: str, param: Symbol) -> Expr:
    return Sym(free_derivative(field_name, param))


def lie_bracket(v: VectorField, x: VectorField, chart: Iterable[Symbol], name: str | None = None) -> VectorField:
    """[V, X] = V o X - X o V, evaluated on every chart symbol.

    Free parameters of either field are unknown functions; their derivatives
    appear as opaque atoms ``D_<field>_<param>``.
    """
    if v.space is not x.space:
        raise SpaceMismatch(f"cannot bracket fields on {v.space.value} and {x.space.value}")
    comps = {}
    for z in chart:
        comps[z] = v.apply(x.component(z)) - x.apply(v.component(z))
    params = tuple(dict.fromkeys(v.free_parameters + x.free_parameters))
    return VectorField(v.space, comps, name or f"B{v.name}{x.name}", params)
