"""Constraint stabilization on both sides and first-class classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .evolution import apply_K, hamiltonian_evolution_field, poisson_bracket
from .expr import Expr, Sym, SymbolKind, is_zero
from .ideal import Constraint, ConstraintSet, make_constraint, reduce_mod
from .legendre import LegendreMap
from .vector_field import time_partial

DEFAULT_MAX_DEPTH = 10


class InconsistentDynamics(ValueError):
    pass


class StabilizationDepthExceeded(RuntimeError):
    pass


def _hamiltonian_step(lmap: LegendreMap, phi: Expr, lams) -> Expr:
    sys = lmap.system
    out = time_partial(phi) + poisson_bracket(sys, phi, lmap.hamiltonian)
    for lam, prim in zip(lams, lmap.phis):
        out = out + lam * poisson_bracket(sys, phi, prim)
    return out


def stabilize_hamiltonian(lmap: LegendreMap, max_depth: int = DEFAULT_MAX_DEPTH,
                          ansatz_degree: int = 4) -> ConstraintSet:
    """Dirac stabilization: d/dt phi + {phi, H} + lambda {phi, phi_mu} ~ 0."""
    lams = [Sym(l) for l in hamiltonian_evolution_field(lmap).lambdas]
    lam_syms = {l.symbol for l in lams}
    levels: list[list[Constraint]] = [[make_constraint(p, "primary", 0) for p in lmap.phis]]
    determinations: list[Expr] = []
    frontier = list(levels[0])
    depth = 0
    while frontier:
        depth += 1
        if depth > max_depth:
            raise StabilizationDepthExceeded(
                f"stabilization did not terminate within {max_depth} generations")
        current = [c.expr for lvl in levels for c in lvl]
        new: list[Constraint] = []
        for c in frontier:
            step = _hamiltonian_step(lmap, c.expr, lams)
            red = reduce_mod(step, current + [n.expr for n in new] + determinations, ansatz_degree)
            nf = red.normal_form
            if red.is_zero:
                continue
            if nf.free_symbols & lam_syms:
                determinations.append(nf)
                continue
            if not nf.free_symbols:
                raise InconsistentDynamics(f"stabilization of {c.expr} gives the nonzero constant {nf}")
            new.append(make_constraint(nf, "{phi,H}", depth))
        if new:
            levels.append(new)
        frontier = new
    return ConstraintSet("hamiltonian", tuple(tuple(l) for l in levels), tuple(determinations))


def lagrangian_constraint_chain(lmap: LegendreMap, hchain: ConstraintSet,
                                ansatz_degree: int = 4) -> ConstraintSet:
    """chi = K.phi for every phi of the Hamiltonian chain, reduced and deduplicated."""
    found: list[Expr] = []
    levels = []
    for n, lvl in enumerate(hchain.levels):
        out = []
        for c in lvl:
            chi = apply_K(lmap, c.expr)
            if is_zero(chi):
                continue
            if found and reduce_mod(chi, found, ansatz_degree).is_zero:
                continue
            found.append(chi)
            out.append(Constraint(chi, None, "K.phi", n))
        if out:
            levels.append(tuple(out))
    return ConstraintSet("lagrangian", tuple(levels))


def velocity_free_constraints(lchain: ConstraintSet) -> list[Expr]:
    """Lagrangian constraints that restrict the configuration variables alone."""
    out = []
    for c in lchain.all():
        kinds = {s.kind for s in c.expr.free_symbols}
        if SymbolKind.VELOCITY not in kinds and SymbolKind.ACCELERATION not in kinds:
            out.append(c.expr)
    return out


@dataclass(frozen=True)
class FirstClassResult:
    first_class: bool
    # D[mu][nu]: {f, phi_mu} = D[mu][nu] phi_nu
    witnesses: tuple[tuple[Expr, ...], ...]
    residuals: tuple[Expr, ...]


def is_first_class_wrt_primaries(lmap: LegendreMap, f: Expr, ansatz_degree: int = 4) -> FirstClassResult:
    sys = lmap.system
    prims = list(lmap.phis)
    D, res = [], []
    for phi in prims:
        red = reduce_mod(poisson_bracket(sys, f, phi), prims, ansatz_degree)
        D.append(tuple(red.combination))
        res.append(red.normal_form)
    return FirstClassResult(all(is_zero(r) for r in res), tuple(D), tuple(res))


def first_class_primaries(lmap: LegendreMap, chain: Sequence[Expr], ansatz_degree: int = 4) -> list[bool]:
    """Which primaries have brackets with H and all primaries weakly zero on ``chain``."""
    sys = lmap.system
    out = []
    for phi in lmap.phis:
        ok = all(reduce_mod(poisson_bracket(sys, phi, g), list(chain), ansatz_degree).is_zero
                 for g in list(lmap.phis) + list(chain))
        out.append(ok)
    return out
