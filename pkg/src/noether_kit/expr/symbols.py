"""Symbols of the jet/phase-space chart and the table that resolves names.

Naming scheme for a coordinate ``x``: velocity ``xdot``, acceleration
``xddot``, momentum ``p_x``.  A gauge function ``eps`` owns the chain
``eps, epsdot, epsddot, eps_d3, eps_d4, ...``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_GAUGE_HIGHER = re.compile(r"(?P<base>[A-Za-z][A-Za-z0-9_]*?)_d(?P<order>[0-9]+)\Z")


class SymbolKind(str, Enum):
    COORDINATE = "coordinate"
    VELOCITY = "velocity"
    ACCELERATION = "acceleration"
    MOMENTUM = "momentum"
    TIME = "time"
    PARAMETER = "parameter"
    GAUGE = "gauge_function_derivative"
    # arbitrary multipliers of evolution fields (lambda^mu, eta^mu)
    FREE = "free_parameter"
    # opaque action of a vector field on a free parameter, e.g. V.eta
    FREE_DERIVATIVE = "free_parameter_derivative"


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    kind: SymbolKind
    base: str | None = None
    order: int = 0

    def __str__(self) -> str:
        return self.name


class SymbolError(ValueError):
    pass


def velocity_name(coord: str) -> str:
    return coord + "dot"


def acceleration_name(coord: str) -> str:
    return coord + "ddot"


def momentum_name(coord: str) -> str:
    return "p_" + coord


def gauge_name(base: str, order: int) -> str:
    if order == 0:
        return base
    if order == 1:
        return base + "dot"
    if order == 2:
        return base + "ddot"
    return f"{base}_d{order}"


TIME = Symbol("t", SymbolKind.TIME)


def gauge_symbol(base: str, order: int) -> Symbol:
    return Symbol(gauge_name(base, order), SymbolKind.GAUGE, base, order)


def free_parameter(name: str) -> Symbol:
    return Symbol(name, SymbolKind.FREE)


def free_derivative(field: str, param: Symbol) -> Symbol:
    """Opaque atom standing for the action of vector field ``field`` on ``param``."""
    return Symbol(f"D_{field}_{param.name}", SymbolKind.FREE_DERIVATIVE, param.name, 1)


class SymbolTable:
    """Resolves identifiers to symbols.

    Coordinates implicitly declare their velocity, acceleration and momentum;
    gauge functions declare their whole derivative chain.
    """

    def __init__(self, coordinates=(), parameters=(), gauge_functions=(), extra=()):
        self._coords: list[str] = []
        self._gauge: list[str] = []
        self._names: dict[str, Symbol] = {"t": TIME}
        for c in coordinates:
            self._add_coordinate(c)
        for p in parameters:
            self._add(Symbol(p, SymbolKind.PARAMETER))
        for g in gauge_functions:
            self._check_identifier(g)
            if g in self._names or g in self._gauge:
                raise SymbolError(f"duplicate identifier {g!r}")
            self._gauge.append(g)
        for s in extra:
            self._add(s)

    @staticmethod
    def _check_identifier(name: str) -> None:
        if not IDENTIFIER.match(name):
            raise SymbolError(f"invalid identifier {name!r}")

    def _add(self, sym: Symbol) -> None:
        self._check_identifier(sym.name)
        existing = self._names.get(sym.name)
        if existing is not None and existing != sym:
            raise SymbolError(f"duplicate identifier {sym.name!r}")
        self._names[sym.name] = sym

    def _add_coordinate(self, name: str) -> None:
        if name.endswith("dot") or name == "t":
            raise SymbolError(f"reserved coordinate name {name!r}")
        if name in self._coords:
            raise SymbolError(f"duplicate coordinate {name!r}")
        self._add(Symbol(name, SymbolKind.COORDINATE))
        self._add(Symbol(velocity_name(name), SymbolKind.VELOCITY, name, 1))
        self._add(Symbol(acceleration_name(name), SymbolKind.ACCELERATION, name, 2))
        self._add(Symbol(momentum_name(name), SymbolKind.MOMENTUM, name, 0))
        self._coords.append(name)

    def extended(self, symbols) -> "SymbolTable":
        table = SymbolTable.__new__(SymbolTable)
        table._coords = list(self._coords)
        table._gauge = list(self._gauge)
        table._names = dict(self._names)
        for s in symbols:
            table._add(s)
        return table

    @property
    def coordinates(self) -> list[Symbol]:
        return [self._names[c] for c in self._coords]

    @property
    def parameters(self) -> list[Symbol]:
        return [s for s in self._names.values() if s.kind is SymbolKind.PARAMETER]

    @property
    def gauge_functions(self) -> list[str]:
        return list(self._gauge)

    def velocity(self, coord: Symbol) -> Symbol:
        return self._names[velocity_name(coord.name)]

    def acceleration(self, coord: Symbol) -> Symbol:
        return self._names[acceleration_name(coord.name)]

    def momentum(self, coord: Symbol) -> Symbol:
        return self._names[momentum_name(coord.name)]

    def lookup(self, name: str) -> Symbol | None:
        sym = self._names.get(name)
        if sym is not None:
            return sym
        for g in self._gauge:
            if name == g:
                return gauge_symbol(g, 0)
            if name == g + "dot":
                return gauge_symbol(g, 1)
            if name == g + "ddot":
                return gauge_symbol(g, 2)
        m = _GAUGE_HIGHER.match(name)
        if m and m.group("base") in self._gauge and int(m.group("order")) >= 3:
            return gauge_symbol(m.group("base"), int(m.group("order")))
        return None

    def __contains__(self, name: str) -> bool:
        return self.lookup(name) is not None

    def __getitem__(self, name: str) -> Symbol:
        sym = self.lookup(name)
        if sym is None:
            raise KeyError(name)
        return sym

    def symbols(self) -> list[Symbol]:
        return list(self._names.values())
