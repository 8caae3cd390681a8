"""Velocity-space objects derived from a Lagrangian."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .expr import Expr, Num, Sym, Symbol, SymbolKind, SymbolTable, diff, free_parameter, is_zero
from .expr.symbols import TIME
from .symlinalg import LinearSolution, NullBasis, RankWarning, SymMatrix, null_space, solve_linear
from .vector_field import Space, VectorField, time_partial


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class SystemModel:
    name: str
    table: SymbolTable
    coordinates: tuple[Symbol, ...]
    velocities: tuple[Symbol, ...]
    accelerations: tuple[Symbol, ...]
    momenta: tuple[Symbol, ...]
    parameters: tuple[Symbol, ...]
    lagrangian: Expr
    momenta_hat: tuple[Expr, ...]
    hessian: SymMatrix
    alpha: tuple[Expr, ...]
    kernel: NullBasis
    euler_lagrange: tuple[Expr, ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    @property
    def tangent_chart(self) -> tuple[Symbol, ...]:
        return (TIME,) + self.coordinates + self.velocities

    @property
    def phase_chart(self) -> tuple[Symbol, ...]:
        return (TIME,) + self.coordinates + self.momenta

    def kernel_fields(self, gammas: Sequence[Sequence[Expr]] | None = None) -> list[VectorField]:
        gammas = self.kernel.vectors if gammas is None else gammas
        return [VectorField(Space.TANGENT, dict(zip(self.velocities, g)), f"Gamma{m + 1}")
                for m, g in enumerate(gammas)]

    def symbol(self, name: str) -> Symbol:
        return self.table[name]


def _check_lagrangian(L: Expr) -> None:
    for s in L.free_symbols:
        if s == TIME:
            raise ModelError("the Lagrangian must not depend explicitly on time t")
        if s.kind in (SymbolKind.MOMENTUM, SymbolKind.ACCELERATION, SymbolKind.GAUGE,
                      SymbolKind.FREE, SymbolKind.FREE_DERIVATIVE):
            raise ModelError(f"the Lagrangian may not contain {s.kind.value} symbol {s.name}")


def build_system(name: str, table: SymbolTable, lagrangian: Expr) -> SystemModel:
    _check_lagrangian(lagrangian)
    coords = tuple(table.coordinates)
    vels = tuple(table.velocity(q) for q in coords)
    accs = tuple(table.acceleration(q) for q in coords)
    moms = tuple(table.momentum(q) for q in coords)
    phat = tuple(diff(lagrangian, v) for v in vels)
    W = SymMatrix([[diff(p, v) for v in vels] for p in phat], ncols=len(vels))
    alpha = tuple(
        diff(lagrangian, q) - sum((vj * diff(phat[i], qj) for qj, vj in zip(coords, vels)), Num(0))
        for i, q in enumerate(coords))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RankWarning)
        kernel = null_space(W)
    notes = tuple(str(w.message) for w in caught if issubclass(w.category, RankWarning))
    el = tuple(
        alpha[i] - sum((Sym(accs[j]) * W[j, i] for j in range(len(coords))), Num(0))
        for i in range(len(coords)))
    for g in kernel.vectors:
        if not all(is_zero(c) for c in W.apply(g)):
            raise ModelError("kernel vector failed W.gamma = 0")  # pragma: no cover
    return SystemModel(name, table, coords, vels, accs, moms, tuple(table.parameters),
                       lagrangian, phat, W, alpha, kernel, el, notes)


def total_time_derivative(sys: SystemModel, f: Expr) -> Expr:
    """d/dt on R x TQ, landing on second-order jets."""
    for s in f.free_symbols:
        if s.kind is SymbolKind.MOMENTUM:
            raise ModelError(f"total_time_derivative: momentum {s.name} present")
        if s.kind is SymbolKind.ACCELERATION:
            raise ModelError(f"total_time_derivative: acceleration {s.name} present")
    out = time_partial(f)
    for q, v, a in zip(sys.coordinates, sys.velocities, sys.accelerations):
        if q in f.free_symbols:
            out = out + Sym(v) * diff(f, q)
        if v in f.free_symbols:
            out = out + Sym(a) * diff(f, v)
    return out


def primary_lagrangian_constraints(sys: SystemModel, gammas=None) -> list[Expr]:
    gammas = sys.kernel.vectors if gammas is None else gammas
    return [sum((a * g for a, g in zip(sys.alpha, gamma)), Num(0)) for gamma in gammas]


def fresh_names(table: SymbolTable, base: str, count: int) -> list[str]:
    names = [base] if count == 1 else [f"{base}{i + 1}" for i in range(count)]
    out = []
    for n in names:
        cand = n
        while cand in table:
            cand = cand + "_"
        out.append(cand)
    return out


@dataclass(frozen=True)
class LagrangianEvolution:
    field: VectorField
    base_field: VectorField
    accelerations: tuple[Expr, ...]
    etas: tuple[Symbol, ...]
    compatibility: tuple[Expr, ...]
    solution: LinearSolution


def lagrangian_evolution_field(sys: SystemModel, gammas=None) -> LagrangianEvolution:
    """X^L = d/dt + qdot d/dq + a d/dqdot + eta^mu Gamma_mu."""
    sol = solve_linear(sys.hessian, sys.alpha, compatibility=True)
    gammas = sys.kernel.vectors if gammas is None else gammas
    etas = tuple(free_parameter(n) for n in fresh_names(sys.table, "eta", len(gammas)))
    base = {TIME: Num(1)}
    for q, v, a in zip(sys.coordinates, sys.velocities, sol.particular):
        base[q] = Sym(v)
        base[v] = a
    x0 = VectorField(Space.TANGENT, base, "XL0")
    comps = dict(base)
    for eta, g in zip(etas, gammas):
        for v, gi in zip(sys.velocities, g):
            comps[v] = comps.get(v, Num(0)) + Sym(eta) * gi
    xl = VectorField(Space.TANGENT, comps, "XL", etas)
    return LagrangianEvolution(xl, x0, tuple(sol.particular), etas, tuple(sol.conditions), sol)
