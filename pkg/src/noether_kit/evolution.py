"""Poisson brackets, the evolution operator K and the Hamiltonian evolution field."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .expr import Expr, Num, Sym, Symbol, SymbolKind, diff, free_parameter, substitute
from .expr.symbols import TIME
from .legendre import LegendreMap, pull_back
from .system import SystemModel, fresh_names, total_time_derivative
from .vector_field import Space, VectorField, lie_bracket, time_partial

__all__ = [
    "EvolutionError", "poisson_bracket", "KOperator", "apply_K", "apply_K_el_form",
    "apply_K_h_form", "hamiltonian_evolution_field", "HamiltonianEvolution", "lie_bracket",
]


class EvolutionError(ValueError):
    pass


def _phase_only(e: Expr, op: str) -> None:
    for s in e.free_symbols:
        if s.kind in (SymbolKind.VELOCITY, SymbolKind.ACCELERATION):
            raise EvolutionError(f"{op}: {s.kind.value} symbol {s.name} in a phase-space function")


def poisson_bracket(sys: SystemModel, f: Expr, g: Expr) -> Expr:
    """{f, g} = sum_i df/dq^i dg/dp_i - df/dp_i dg/dq^i."""
    _phase_only(f, "poisson_bracket")
    _phase_only(g, "poisson_bracket")
    ff, gf = f.free_symbols, g.free_symbols
    out = Num(0)
    for q, p in zip(sys.coordinates, sys.momenta):
        if q in ff and p in gf:
            out = out + diff(f, q) * diff(g, p)
        if p in ff and q in gf:
            out = out - diff(f, p) * diff(g, q)
    return out


def apply_K(lmap: LegendreMap, h: Expr) -> Expr:
    """K.h = FL*(dh/dt) + q̇ FL*(dh/dq) + dL/dq FL*(dh/dp)."""
    sys = lmap.system
    _phase_only(h, "apply_K")
    out = pull_back(sys, time_partial(h))
    for q, v, p in zip(sys.coordinates, sys.velocities, sys.momenta):
        if q in h.free_symbols:
            out = out + Sym(v) * pull_back(sys, diff(h, q))
        if p in h.free_symbols:
            out = out + diff(sys.lagrangian, q) * pull_back(sys, diff(h, p))
    return out


def apply_K_el_form(lmap: LegendreMap, h: Expr) -> Expr:
    """d/dt FL*(h) + [L]_i FL*(dh/dp_i), on second-order jets."""
    sys = lmap.system
    _phase_only(h, "apply_K_el_form")
    out = total_time_derivative(sys, pull_back(sys, h))
    for el, p in zip(sys.euler_lagrange, sys.momenta):
        if p in h.free_symbols:
            out = out + el * pull_back(sys, diff(h, p))
    return out


def apply_K_h_form(lmap: LegendreMap, h: Expr) -> Expr:
    """FL*(dh/dt) + FL*{h, H} + FL*{h, phi_mu} v^mu."""
    sys = lmap.system
    _phase_only(h, "apply_K_h_form")
    out = pull_back(sys, time_partial(h) + poisson_bracket(sys, h, lmap.hamiltonian))
    for phi, v in zip(lmap.phis, lmap.v):
        out = out + pull_back(sys, poisson_bracket(sys, h, phi)) * v
    return out


@dataclass(frozen=True)
class KOperator:
    lmap: LegendreMap

    @property
    def system(self) -> SystemModel:
        return self.lmap.system

    def __call__(self, h: Expr) -> Expr:
        return apply_K(self.lmap, h)

    def el_form(self, h: Expr) -> Expr:
        return apply_K_el_form(self.lmap, h)

    def h_form(self, h: Expr) -> Expr:
        return apply_K_h_form(self.lmap, h)


@dataclass(frozen=True)
class HamiltonianEvolution:
    field: VectorField
    lambdas: tuple[Symbol, ...]


def hamiltonian_evolution_field(lmap: LegendreMap, name: str = "XH") -> HamiltonianEvolution:
    """X^H = d/dt + {-, H} + lambda^mu {-, phi_mu} (weak form, no Z term)."""
    sys = lmap.system
    lams = tuple(free_parameter(n) for n in fresh_names(sys.table, "lam", len(lmap.phis)))
    H = lmap.hamiltonian
    comps: dict = {TIME: Num(1)}
    for z in sys.coordinates + sys.momenta:
        c = poisson_bracket(sys, Sym(z), H)
        for lam, phi in zip(lams, lmap.phis):
            c = c + Sym(lam) * poisson_bracket(sys, Sym(z), phi)
        comps[z] = c
    return HamiltonianEvolution(VectorField(Space.COTANGENT, comps, name, lams), lams)


def hamiltonian_field(sys: SystemModel, g: Expr, name: str = "VH") -> VectorField:
    """{-, g}: the canonical field generated by g (no time component)."""
    _phase_only(g, "hamiltonian_field")
    comps = {}
    for q, p in zip(sys.coordinates, sys.momenta):
        comps[q] = diff(g, p)
        comps[p] = -diff(g, q)
    return VectorField(Space.COTANGENT, comps, name)


def substitute_multipliers(e: Expr, lams: Sequence[Symbol], values: Sequence[Expr]) -> Expr:
    return substitute(e, dict(zip(lams, values)))
