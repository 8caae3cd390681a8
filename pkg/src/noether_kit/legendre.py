"""The Legendre map: pull-back, its partial inverse, primary constraints and H."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .expr import Expr, Num, Sym, Symbol, SymbolKind, diff, is_zero, substitute, substitute_sequential
from .expr.calculus import linear_coefficients
from .ideal import reduce_mod
from .symlinalg import InconsistentSystem, SymMatrix, rank, solve_linear
from .system import SystemModel
from .vector_field import VectorField


class LegendreError(ValueError):
    pass


@dataclass(frozen=True)
class VelocityElimination:
    """q̇^a = expr(q, p, remaining velocities), applied in order."""

    steps: tuple[tuple[Symbol, Expr], ...]
    free_velocities: tuple[Symbol, ...]


@dataclass(frozen=True)
class HamiltonianCheck:
    ok: bool
    residual: Expr
    modulo_constraints: bool = False


@dataclass(frozen=True)
class LegendreMap:
    system: SystemModel
    momentum_bindings: dict
    elimination: VelocityElimination | None
    phis: tuple[Expr, ...]
    phis_derived: bool
    hamiltonian: Expr
    hamiltonian_derived: bool
    hamiltonian_check: HamiltonianCheck
    gammas: tuple[tuple[Expr, ...], ...]
    alignment: SymMatrix
    v: tuple[Expr, ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def kernel_fields(self) -> list[VectorField]:
        return self.system.kernel_fields(self.gammas)

    def pull_back(self, h: Expr) -> Expr:
        return pull_back(self.system, h)

    def lift(self, f: Expr) -> Expr | None:
        return lift(self, f)


def _energy(sys: SystemModel) -> Expr:
    return sum((p * Sym(v) for p, v in zip(sys.momenta_hat, sys.velocities)), Num(0)) - sys.lagrangian


def pull_back(sys: SystemModel, h: Expr) -> Expr:
    """FL*: replace every momentum p_i by its velocity expression."""
    for s in h.free_symbols:
        if s.kind in (SymbolKind.VELOCITY, SymbolKind.ACCELERATION):
            raise LegendreError(f"pull_back: {s.kind.value} symbol {s.name} in a phase-space function")
    return substitute(h, dict(zip(sys.momenta, sys.momenta_hat)))


def projectability_residuals(sys: SystemModel, f: Expr, gammas=None) -> list[Expr]:
    for s in f.free_symbols:
        if s.kind in (SymbolKind.ACCELERATION, SymbolKind.MOMENTUM):
            raise LegendreError(f"is_projectable: {s.kind.value} symbol {s.name} present")
    return [fld.apply(f) for fld in sys.kernel_fields(gammas)]


def is_projectable(sys: SystemModel, f: Expr, gammas=None) -> tuple[bool, list[Expr]]:
    res = projectability_residuals(sys, f, gammas)
    return all(is_zero(r) for r in res), res


def eliminate_velocities(sys: SystemModel) -> tuple[VelocityElimination, list[Expr]]:
    """Triangular elimination of velocities from p = p̂(q, q̇).

    Returns the elimination and the leftover velocity-free relations
    p_i - g_i(q, p), which are the primary Hamiltonian constraints.
    """
    remaining = {p: Sym(p) - ph for p, ph in zip(sys.momenta, sys.momenta_hat)}
    unsolved = list(sys.velocities)
    steps: list[tuple[Symbol, Expr]] = []
    progress = True
    while progress:
        progress = False
        best = None
        for p, rel in remaining.items():
            for v in unsolved:
                if v not in rel.free_symbols:
                    continue
                lin = linear_coefficients(rel, [v])
                if lin is None:
                    continue
                coeffs, rest = lin
                a = coeffs[v]
                if is_zero(a):
                    continue
                score = (0 if isinstance(a, Num) else 1, a.size, v.name)
                if best is None or score < best[0]:
                    best = (score, p, v, a, rest)
        if best is not None:
            _, p, v, a, rest = best
            sol = -rest / a
            steps.append((v, sol))
            unsolved.remove(v)
            del remaining[p]
            remaining = {k: substitute(e, {v: sol}) for k, e in remaining.items()}
            progress = True
    phis = []
    for p, rel in remaining.items():
        if any(s.kind is SymbolKind.VELOCITY for s in rel.free_symbols):
            raise LegendreError(
                f"cannot eliminate velocities from the binding of {p.name}: "
                "supply primary_constraints (and hamiltonian) in the declaration")
        phis.append(rel)
    return VelocityElimination(tuple(steps), tuple(unsolved)), phis


def lift(lmap_or_sys, f: Expr, elimination: VelocityElimination | None = None) -> Expr | None:
    """Some h(t, q, p) with FL*(h) == f, or None when f is not projectable."""
    if isinstance(lmap_or_sys, LegendreMap):
        sys, elimination = lmap_or_sys.system, lmap_or_sys.elimination
    else:
        sys = lmap_or_sys
    if elimination is None:
        raise LegendreError("no velocity elimination available for lifting")
    h = substitute_sequential(f, list(elimination.steps))
    if any(s.kind is SymbolKind.VELOCITY for s in h.free_symbols):
        return None
    if not is_zero(pull_back(sys, h) - f):
        return None
    return h


def derive_primary_constraints(sys: SystemModel) -> list[Expr]:
    _, phis = eliminate_velocities(sys)
    return phis


def _verify_phis(sys: SystemModel, phis: Sequence[Expr]) -> None:
    for phi in phis:
        if not is_zero(pull_back(sys, phi)):
            raise LegendreError(f"FL*({phi}) is not zero; not a primary constraint")
    if len(phis) != len(sys.kernel.vectors):
        raise LegendreError(
            f"{len(phis)} primary constraints for a kernel of dimension {len(sys.kernel.vectors)}")
    if phis:
        chart = list(sys.coordinates) + list(sys.momenta)
        J = SymMatrix([[diff(phi, z) for z in chart] for phi in phis])
        if rank(J) != len(phis):
            raise LegendreError("primary constraints are not independent")


def verify_hamiltonian(sys: SystemModel, H: Expr, phis: Sequence[Expr] = (),
                       reference: Expr | None = None) -> HamiltonianCheck:
    """FL*(H) must equal the Lagrangian energy.

    When it does not, H is still accepted if it differs from ``reference``
    (a Hamiltonian derived from the energy) by a combination of ``phis``.
    """
    residual = pull_back(sys, H) - _energy(sys)
    if is_zero(residual):
        return HamiltonianCheck(True, residual)
    if reference is not None and phis:
        red = reduce_mod(H - reference, list(phis))
        if red.is_zero:
            return HamiltonianCheck(True, residual, modulo_constraints=True)
    return HamiltonianCheck(False, residual)


def align_kernel(sys: SystemModel, phis: Sequence[Expr]) -> tuple[list[list[Expr]], SymMatrix]:
    """gamma_mu := FL*(d phi_mu / d p), checked to span the Hessian kernel."""
    gammas = [[pull_back(sys, diff(phi, p)) for p in sys.momenta] for phi in phis]
    W = sys.hessian
    for g in gammas:
        if not all(is_zero(c) for c in W.apply(g)):
            raise LegendreError("FL*(dphi/dp) is not a null vector of the Hessian")
    k = len(gammas)
    if k == 0:
        return [], SymMatrix([], ncols=0)
    basis = SymMatrix([[sys.kernel.vectors[nu][i] for nu in range(k)] for i in range(sys.dim)])
    rows = []
    for g in gammas:
        sol = solve_linear(basis, g)
        rows.append(sol.particular)
    A = SymMatrix(rows)
    if rank(A) != k:
        raise LegendreError("FL*(dphi/dp) does not span the Hessian kernel")
    return gammas, A


def solve_v_multipliers(sys: SystemModel, H: Expr, phis: Sequence[Expr], gammas) -> list[Expr]:
    """v^mu from q̇ = FL*(dH/dp) + FL*(dphi_mu/dp) v^mu."""
    if not phis:
        for q, v, p in zip(sys.coordinates, sys.velocities, sys.momenta):
            if not is_zero(Sym(v) - pull_back(sys, diff(H, p))):
                raise LegendreError("q̇ != FL*(dH/dp): wrong Hamiltonian")
        return []
    M = SymMatrix([[gammas[mu][i] for mu in range(len(phis))] for i in range(sys.dim)])
    b = [Sym(v) - pull_back(sys, diff(H, p)) for v, p in zip(sys.velocities, sys.momenta)]
    try:
        sol = solve_linear(M, b)
    except InconsistentSystem as exc:
        raise LegendreError(f"cannot solve for v multipliers: {exc}") from exc
    v = sol.particular
    fields = sys.kernel_fields(gammas)
    for nu, fld in enumerate(fields):
        for mu, vm in enumerate(v):
            if not is_zero(fld.apply(vm) - (1 if mu == nu else 0)):
                raise LegendreError("Gamma_nu . v^mu != delta")
    return v


def build_legendre(sys: SystemModel, hamiltonian: Expr | None = None,
                   primary_constraints: Sequence[Expr] | None = None) -> LegendreMap:
    notes: list[str] = []
    bindings = dict(zip(sys.momenta, sys.momenta_hat))
    try:
        elim, derived = eliminate_velocities(sys)
    except LegendreError as exc:
        if primary_constraints is None or hamiltonian is None:
            raise
        elim, derived = None, None
        notes.append(str(exc))
    if primary_constraints is not None:
        phis = list(primary_constraints)
        _verify_phis(sys, phis)
        phis_derived = False
    else:
        phis = derived
        _verify_phis(sys, phis)
        phis_derived = True
    reference = lift(sys, _energy(sys), elim) if elim is not None else None
    if hamiltonian is None:
        if reference is None:
            raise LegendreError("cannot derive a Hamiltonian; supply one in the declaration")
        H, H_derived = reference, True
    else:
        H, H_derived = hamiltonian, False
    check = verify_hamiltonian(sys, H, phis, reference)
    if not check.ok:
        raise LegendreError(f"FL*(H) differs from the energy by {check.residual}")
    gammas, A = align_kernel(sys, phis)
    v = solve_v_multipliers(sys, H, phis, gammas)
    return LegendreMap(sys, bindings, elim, tuple(phis), phis_derived, H, H_derived, check,
                       tuple(tuple(g) for g in gammas), A, tuple(v), tuple(notes))
