"""Canonical Noether symmetry checks for a generating function G^H(t, q, p).

Four characterizations are implemented independently:

* the K-condition ``K.G == 0``;
* the phase-space split conditions on ``dG/dt + {G, H}`` and ``{G, phi}``,
  with the commutator ``[V^H, X^H]`` as a demonstration;
* the velocity-space trio (projection, tangency, ``[V^L, X^L]``);
* commutation of ``delta^L`` with ``K`` on a generating family of functions.

Residues that depend only on time and the gauge-function chain are removed
from ``K.G`` and from ``dG/dt + {G, H}`` (the ``G -> G - int f(t) dt``
freedom) and reported as a redefinition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .constraints import is_first_class_wrt_primaries, stabilize_hamiltonian, velocity_free_constraints
from .constraints import lagrangian_constraint_chain
from .evolution import HamiltonianEvolution, apply_K, hamiltonian_evolution_field, poisson_bracket
from .expr import (Expr, Num, Sym, Symbol, SymbolKind, canonical, diff, exp, gauge_symbol, is_zero,
                   polynomial_coefficients, split_terms, substitute)
from .expr.normal import to_rf
from .ideal import ConstraintSet, Reduction, UnsupportedReduction, reduce_mod, solve_rational
from .legendre import LegendreMap, lift, projectability_residuals, pull_back
from .sampling import DEFAULT_SEED, random_polynomials
from .symlinalg import SymMatrix, solve_linear
from .system import LagrangianEvolution, lagrangian_evolution_field, total_time_derivative
from .vector_field import Space, VectorField, lie_bracket, time_partial


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    PARTIAL_NONPROJECTABLE = "PARTIAL-NONPROJECTABLE"


def _v(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL


class NoetherError(ValueError):
    pass


@dataclass(frozen=True)
class NoetherContext:
    """Everything the checks need about one system."""

    lmap: LegendreMap
    hchain: ConstraintSet
    lchain: ConstraintSet
    xl: LagrangianEvolution
    xh: HamiltonianEvolution
    primary_chis: tuple[Expr, ...]
    ansatz_degree: int = 4
    seed: int = DEFAULT_SEED
    n_random: int = 10

    @classmethod
    def build(cls, lmap: LegendreMap, hchain: ConstraintSet | None = None,
              lchain: ConstraintSet | None = None, max_depth: int = 10, ansatz_degree: int = 4,
              seed: int = DEFAULT_SEED, n_random: int = 10) -> "NoetherContext":
        hchain = hchain or stabilize_hamiltonian(lmap, max_depth, ansatz_degree)
        lchain = lchain or lagrangian_constraint_chain(lmap, hchain, ansatz_degree)
        chis = tuple(apply_K(lmap, phi) for phi in lmap.phis)
        return cls(lmap, hchain, lchain, lagrangian_evolution_field(lmap.system, lmap.gammas),
                   hamiltonian_evolution_field(lmap), chis, ansatz_degree, seed, n_random)

    @property
    def system(self):
        return self.lmap.system

    def reduce(self, f: Expr, constraints: Sequence[Expr]) -> Reduction:
        return reduce_mod(f, list(constraints), self.ansatz_degree)

    def random_functions(self, count: int | None = None) -> list[Expr]:
        sys = self.system
        return random_polynomials(list(sys.coordinates) + list(sys.momenta),
                                  self.n_random if count is None else count, self.seed)


@dataclass(frozen=True)
class GeneratorCandidate:
    name: str
    G_H: Expr
    G_L: Expr
    delta_H_q: tuple[Expr, ...]
    delta_H_p: tuple[Expr, ...]
    delta_L_q: tuple[Expr, ...]
    delta_L_qdot: tuple[Expr, ...]
    V_H: VectorField
    V_L: VectorField
    V_L_bar: VectorField


def make_candidate(lmap: LegendreMap, G_H: Expr, name: str = "G") -> GeneratorCandidate:
    sys = lmap.system
    for s in G_H.free_symbols:
        if s.kind in (SymbolKind.VELOCITY, SymbolKind.ACCELERATION):
            raise NoetherError(f"generator {name} contains {s.kind.value} symbol {s.name}")
    dq = tuple(diff(G_H, p) for p in sys.momenta)
    dp = tuple(-diff(G_H, q) for q in sys.coordinates)
    dlq = tuple(pull_back(sys, e) for e in dq)
    dlv = tuple(apply_K(lmap, e) for e in dq)
    vh = VectorField(Space.COTANGENT, {**dict(zip(sys.coordinates, dq)), **dict(zip(sys.momenta, dp))}, "VH")
    vl = VectorField(Space.TANGENT, {**dict(zip(sys.coordinates, dlq)), **dict(zip(sys.velocities, dlv))}, "VL")
    bar = VectorField(Space.TANGENT, {**dict(zip(sys.coordinates, dlq)),
                                      **{v: total_time_derivative(sys, e) for v, e in zip(sys.velocities, dlq)}},
                      "VLbar")
    return GeneratorCandidate(name, G_H, pull_back(sys, G_H), dq, dp, dlq, dlv, vh, vl, bar)


def _time_only(syms) -> bool:
    return all(s.kind in (SymbolKind.TIME, SymbolKind.GAUGE, SymbolKind.PARAMETER) for s in syms)


def strip_time_only(e: Expr) -> tuple[Expr, Expr]:
    """(f(t), rest): the terms depending only on t, the gauge chain and parameters."""
    return split_terms(e, _time_only)


# K-condition

@dataclass(frozen=True)
class KConditionResult:
    verdict: Verdict
    K_G: Expr
    residual: Expr
    redefinition: Expr
    plc_combination: tuple[Expr, ...] = ()


def check_K_condition(ctx: NoetherContext, cand: GeneratorCandidate) -> KConditionResult:
    kg = apply_K(ctx.lmap, cand.G_H)
    removed, rest = strip_time_only(kg)
    if is_zero(rest):
        return KConditionResult(Verdict.PASS, kg, Num(0), removed)
    if ctx.primary_chis:
        red = ctx.reduce(rest, ctx.primary_chis)
        if red.is_zero:
            return KConditionResult(Verdict.PARTIAL_NONPROJECTABLE, kg, rest, removed,
                                    tuple(red.combination))
    return KConditionResult(Verdict.FAIL, kg, rest, removed)


# phase space

@dataclass(frozen=True)
class CommutatorDemo:
    bracket: VectorField
    coefficients: tuple[Expr, ...]
    residuals: tuple[Expr, ...]
    holds: bool


@dataclass(frozen=True)
class PhaseSpaceResult:
    verdict: Verdict
    cond2_expr: Expr
    cond2_residual: Expr
    cond2_combination: tuple[Expr, ...]
    cond1_residuals: tuple[Expr, ...]
    D: tuple[tuple[Expr, ...], ...]
    redefinition: Expr
    commutator: CommutatorDemo | None = None


def commutator_demo(ctx: NoetherContext, cand: GeneratorCandidate) -> CommutatorDemo:
    """[V^H, X^H] reduced modulo primaries against {-, c^mu phi_mu}."""
    sys, phis = ctx.system, list(ctx.lmap.phis)
    chart = sys.phase_chart
    br = lie_bracket(cand.V_H, ctx.xh.field, chart)
    red = (lambda e: ctx.reduce(e, phis).normal_form) if phis else (lambda e: e)
    b = [red(br.component(z)) for z in chart]
    M = SymMatrix([[red(poisson_bracket(sys, Sym(z), phi)) for phi in phis] for z in chart], ncols=len(phis))
    sol = solve_linear(M, b, compatibility=True)
    residuals = tuple(red(c) for c in sol.conditions)
    return CommutatorDemo(br, tuple(sol.particular), residuals, all(is_zero(r) for r in residuals))


def check_phase_space(ctx: NoetherContext, cand: GeneratorCandidate, demonstrate: bool = True) -> PhaseSpaceResult:
    sys, phis = ctx.system, list(ctx.lmap.phis)
    c2 = time_partial(cand.G_H) + poisson_bracket(sys, cand.G_H, ctx.lmap.hamiltonian)
    removed, rest = strip_time_only(c2)
    if phis:
        red = ctx.reduce(rest, phis)
        c2_res, c2_comb = red.normal_form, tuple(red.combination)
    else:
        c2_res, c2_comb = rest, ()
    fc = is_first_class_wrt_primaries(ctx.lmap, cand.G_H, ctx.ansatz_degree)
    ok = is_zero(c2_res) and fc.first_class
    demo = commutator_demo(ctx, cand) if demonstrate else None
    return PhaseSpaceResult(_v(ok), c2, c2_res, c2_comb, fc.residuals, fc.witnesses, removed, demo)


# velocity space

@dataclass(frozen=True)
class VelocitySpaceResult:
    verdict: Verdict
    projection: Verdict
    projection_residuals: tuple[Expr, ...]
    tangency: Verdict
    tangency_residuals: tuple[Expr, ...]
    tangency_witnesses: tuple[tuple[Expr, ...], ...]
    bracket_verdict: Verdict
    bracket: VectorField
    beta: tuple[Expr, ...]
    bracket_remainder: tuple[Expr, ...]
    necsuf: bool
    nonecsuf: bool
    conditions_differ: bool
    restricts_configuration: bool


def check_velocity_space(ctx: NoetherContext, cand: GeneratorCandidate) -> VelocitySpaceResult:
    sys, lmap = ctx.system, ctx.lmap
    chis = list(ctx.primary_chis)

    def red(e: Expr) -> Reduction:
        return ctx.reduce(e, chis) if chis else Reduction(e, [], is_zero(e))

    # (a) V^L projects to V^H on the chart-generating functions
    proj = []
    for z in list(sys.coordinates) + list(sys.momenta):
        proj.append(cand.V_L.apply(pull_back(sys, Sym(z))) - pull_back(sys, cand.V_H.apply(Sym(z))))
    a_ok = all(is_zero(r) for r in proj)

    # (b) tangency to the primary Lagrangian constraints
    tres, twit = [], []
    for chi in chis:
        r = red(cand.V_L.apply(chi))
        tres.append(r.normal_form)
        twit.append(tuple(r.combination))
    b_ok = all(is_zero(r) for r in tres)

    # (c) [V^L, X^L] = plc + beta^mu Gamma_mu
    br = lie_bracket(cand.V_L, ctx.xl.field, sys.tangent_chart)
    remainder = []
    for z in (sys.tangent_chart[0],) + sys.coordinates:
        remainder.append(red(br.component(z)).normal_form)
    nf = [red(br.component(v)).normal_form for v in sys.velocities]
    k = len(lmap.gammas)
    G = SymMatrix([[lmap.gammas[mu][i] for mu in range(k)] for i in range(sys.dim)], ncols=k)
    sol = solve_linear(G, nf, compatibility=True)
    remainder.extend(red(c).normal_form for c in sol.conditions)
    c_ok = all(is_zero(r) for r in remainder)

    kg = apply_K(lmap, cand.G_H)
    dv = [diff(kg, v) for v in sys.velocities]
    dq = [diff(kg, q) for q in sys.coordinates]
    necsuf = all(is_zero(e) for e in dv + dq)
    nonecsuf = all(is_zero(e) for e in dv) and all(red(e).is_zero for e in dq)
    restricts = bool(velocity_free_constraints(ctx.lchain))
    ok = a_ok and b_ok and c_ok
    return VelocitySpaceResult(_v(ok), _v(a_ok), tuple(proj), _v(b_ok), tuple(tres), tuple(twit),
                               _v(c_ok), br, tuple(sol.particular), tuple(remainder),
                               necsuf, nonecsuf, nonecsuf and not necsuf, restricts)


# commutation with K

@dataclass(frozen=True)
class CommutationResult:
    verdict: Verdict
    # the difference operator is sum_z coefficients[z] * FL*(dh/dz)
    coefficients: dict
    family_residuals: tuple[Expr, ...]
    random_residuals: tuple[Expr, ...]
    first_order: bool
    pullback_residuals: tuple[Expr, ...]
    theorem3_q: tuple[Expr, ...]
    theorem3_v: tuple[Expr, ...]
    theorem3_ok: bool


def commutation_difference(ctx: NoetherContext, cand: GeneratorCandidate, h: Expr) -> Expr:
    """(delta^L o K - K o delta^H) h."""
    return cand.V_L.apply(apply_K(ctx.lmap, h)) - apply_K(ctx.lmap, cand.V_H.apply(h))


def generating_family(sys) -> list[Expr]:
    out: list[Expr] = []
    for q, p in zip(sys.coordinates, sys.momenta):
        out += [Sym(q), Sym(p), Sym(q) ** 2 / 2, Sym(q) * Sym(p)]
    return out


def check_commutation_with_K(ctx: NoetherContext, cand: GeneratorCandidate) -> CommutationResult:
    sys, lmap = ctx.system, ctx.lmap
    chart = list(sys.coordinates) + list(sys.momenta)
    coeffs = {z: commutation_difference(ctx, cand, Sym(z)) for z in chart}
    fam = generating_family(sys)
    rnd = ctx.random_functions()
    fres = tuple(commutation_difference(ctx, cand, h) for h in fam)
    rres = tuple(commutation_difference(ctx, cand, h) for h in rnd)
    first_order = True
    for h, d in zip(fam + rnd, fres + rres):
        pred = sum((c * pull_back(sys, diff(h, z)) for z, c in coeffs.items()), Num(0))
        first_order = first_order and is_zero(d - pred)
    kg = apply_K(lmap, cand.G_H)
    pres = []
    for h in fam:
        lhs = cand.V_L.apply(pull_back(sys, h)) - pull_back(sys, cand.V_H.apply(h))
        rhs = sum((pull_back(sys, diff(h, p)) * diff(kg, v) for p, v in zip(sys.momenta, sys.velocities)),
                  Num(0))
        pres.append(lhs - rhs)
    t3q, t3v = [], []
    for q, v, p, ph in zip(sys.coordinates, sys.velocities, sys.momenta, sys.momenta_hat):
        t3q.append(coeffs[p] - diff(kg, q))
        t3v.append(cand.V_L.apply(ph) - pull_back(sys, cand.V_H.apply(Sym(p))) - diff(kg, v))
    t3_ok = all(is_zero(e) for e in t3q + t3v + pres)
    ok = all(is_zero(d) for d in fres + rres)
    return CommutationResult(_v(ok), coeffs, fres, rres, first_order, tuple(pres), tuple(t3q),
                             tuple(t3v), t3_ok)


# total derivative of the Lagrangian

@dataclass(frozen=True)
class BarDeltaResult:
    verdict: Verdict
    bar_delta_L: Expr
    boundary: Expr
    residual: Expr
    delta_L_L: Expr
    noether_identity_residual: Expr
    bar_relation_residuals: tuple[Expr, ...]


def check_bar_delta_total_derivative(ctx: NoetherContext, cand: GeneratorCandidate) -> BarDeltaResult:
    sys = ctx.system
    L = sys.lagrangian
    bar_l = cand.V_L_bar.apply(L)
    pdq = sum((Sym(p) * d for p, d in zip(sys.momenta, cand.delta_H_q)), Num(0))
    boundary = pull_back(sys, pdq - cand.G_H)
    residual = bar_l - total_time_derivative(sys, boundary)
    identity = total_time_derivative(sys, cand.G_L)
    for el, d in zip(sys.euler_lagrange, cand.delta_L_q):
        identity = identity + el * d
    rel = []
    for i, v in enumerate(sys.velocities):
        r = cand.V_L_bar.component(v) - cand.V_L.component(v)
        for j, p in enumerate(sys.momenta):
            r = r + sys.euler_lagrange[j] * pull_back(sys, diff(cand.delta_H_q[i], p))
        rel.append(r)
    return BarDeltaResult(_v(is_zero(residual)), bar_l, boundary, residual, cand.V_L.apply(L),
                          identity, tuple(rel))


# full report for one candidate

@dataclass(frozen=True)
class NoetherReport:
    candidate: GeneratorCandidate
    k_condition: KConditionResult
    phase_space: PhaseSpaceResult
    velocity_space: VelocitySpaceResult
    commutation: CommutationResult
    bar_delta: BarDeltaResult

    @property
    def noether(self) -> Verdict:
        return _v(self.k_condition.verdict is Verdict.PASS)

    @property
    def equivalence_holds(self) -> bool:
        a = self.k_condition.verdict is Verdict.PASS
        return a == (self.phase_space.verdict is Verdict.PASS) == (self.commutation.verdict is Verdict.PASS)

    @property
    def implication_holds(self) -> bool:
        return self.k_condition.verdict is not Verdict.PASS or self.velocity_space.verdict is Verdict.PASS


def analyze_candidate(ctx: NoetherContext, cand: GeneratorCandidate) -> NoetherReport:
    return NoetherReport(cand, check_K_condition(ctx, cand), check_phase_space(ctx, cand),
                         check_velocity_space(ctx, cand), check_commutation_with_K(ctx, cand),
                         check_bar_delta_total_derivative(ctx, cand))


# gauge generators

@dataclass(frozen=True)
class GaugeSolution:
    ok: bool
    candidate: GeneratorCandidate | None
    components: tuple[Expr, ...]
    # components[k] = sum decompositions[k][n] * chain[n]
    decompositions: tuple[tuple[Expr, ...], ...]
    seed: Expr
    obstruction: tuple[Expr, ...] = ()
    notes: tuple[str, ...] = field(default=())


def _gauge_attempt(ctx: NoetherContext, seed: Expr, depth: int) -> tuple[list[Expr] | None, list[Expr], str]:
    """G_0 = seed, FL*(G_{k+1}) = -K.G_k, and K.G_depth absorbed by b^mu phi_mu."""
    lmap, sys = ctx.lmap, ctx.system
    Gs = [seed]
    for k in range(depth):
        kg = apply_K(lmap, Gs[k])
        h = lift(lmap, kg)
        if h is None:
            return None, [r for r in projectability_residuals(sys, kg, lmap.gammas) if not is_zero(r)], \
                f"K.G_{k} is not projectable"
        Gs.append(-h)
    kg = apply_K(lmap, Gs[-1])
    if is_zero(kg):
        return Gs, [], ""
    red = ctx.reduce(kg, ctx.primary_chis)
    if not red.is_zero:
        return None, [red.normal_form], f"K.G_{depth} is not a combination of primary Lagrangian constraints"
    extra = Num(0)
    obstruction = []
    for c, phi in zip(red.combination, lmap.phis):
        b = lift(lmap, -c)
        if b is None:
            obstruction += [r for r in projectability_residuals(sys, -c, lmap.gammas) if not is_zero(r)]
        else:
            extra = extra + b * phi
    if obstruction:
        return None, obstruction, "the primary-constraint freedom needs a nonprojectable coefficient"
    Gs[-1] = Gs[-1] + extra
    return Gs, [], ""


def _solve_scale(residuals: Sequence[Expr], c: Symbol, q: Symbol) -> Fraction | None:
    """Rational c making every residual (a multiple of exp(c*q)) vanish."""
    value = None
    for r in residuals:
        r = canonical(r * exp(-Sym(c) * Sym(q)))
        co = polynomial_coefficients(r, c)
        if co is None or set(co) - {0, 1} or 1 not in co:
            return None
        ratio = canonical(-co.get(0, Num(0)) / co[1])
        if not isinstance(ratio, Num):
            return None
        if value is not None and value != ratio.value:
            return None
        value = ratio.value
    return value


def solve_gauge_generator(ctx: NoetherContext, seed: Expr, depth: int = 1, gauge: str | None = None,
                          name: str = "Ggauge") -> GaugeSolution:
    """Solve K.G = 0 for G = sum_k eps^(depth-k) G_k with G_0 built from ``seed``.

    When the seed itself is obstructed, rescalings ``seed * exp(c q)`` are tried
    for each coordinate q with c solved for from the obstruction.
    """
    lmap, sys = ctx.lmap, ctx.system
    if not lmap.phis:
        raise NoetherError("no primary constraints: gauge generators need a singular Lagrangian")
    if not is_zero(pull_back(sys, seed)):
        raise NoetherError(f"seed {seed} is not a primary Hamiltonian constraint combination")
    if not is_first_class_wrt_primaries(lmap, seed, ctx.ansatz_degree).first_class:
        raise NoetherError(f"seed {seed} is not first class with respect to the primary constraints")
    base = gauge or (sys.table.gauge_functions[0] if sys.table.gauge_functions else "eps")
    notes = []
    Gs, obstruction, why = _gauge_attempt(ctx, seed, depth)
    used = seed
    if Gs is None:
        notes.append(f"seed {seed}: {why}")
        c = Symbol("c_scale", SymbolKind.PARAMETER)
        for q in sys.coordinates:
            trial = seed * exp(Sym(c) * Sym(q))
            _, obs, _ = _gauge_attempt(ctx, trial, depth)
            if not obs:
                continue
            val = _solve_scale(obs, c, q)
            if val is None:
                continue
            scaled = canonical(seed * exp(Num(val) * Sym(q)))
            Gs2, obs2, why2 = _gauge_attempt(ctx, scaled, depth)
            if Gs2 is not None:
                notes.append(f"rescaled seed by exp({Num(val) * Sym(q)})")
                Gs, used, obstruction = Gs2, scaled, []
                break
    if Gs is None:
        return GaugeSolution(False, None, (), (), seed, tuple(obstruction), tuple(notes))
    eps = [Sym(gauge_symbol(base, n)) for n in range(depth + 1)]
    G = sum((eps[depth - k] * g for k, g in enumerate(Gs)), Num(0))
    chain = ctx.hchain.exprs()
    decomp = []
    for g in Gs:
        try:
            r = ctx.reduce(g, chain)
            decomp.append(tuple(r.combination) if r.is_zero else ())
        except UnsupportedReduction:
            decomp.append(())
    return GaugeSolution(True, make_candidate(lmap, G, name), tuple(Gs), tuple(decomp), used, (), tuple(notes))


# structure functions

@dataclass(frozen=True)
class StructureResult:
    # C[i][j][k]: V^L_j . G^L_i = FL*(C^k_ij) G^L_k
    C: tuple
    constant: bool
    matched: bool
    match_residuals: tuple[Expr, ...]
    projection_residuals: tuple[Expr, ...]
    bracket_residuals: tuple[Expr, ...]

    @property
    def closes(self) -> bool:
        return self.matched and all(is_zero(r) for r in self.projection_residuals) and \
            all(is_zero(r) for r in self.bracket_residuals)


def _constant_combination(target: Expr, gens: Sequence[Expr]) -> list[Expr] | None:
    T = to_rf(target)
    G = [to_rf(g) for g in gens]
    if T.den or any(g.den for g in G):
        return None
    x = solve_rational([dict(g.num) for g in G], dict(T.num))
    return None if x is None else [Num(v) for v in x]


def structure_functions(ctx: NoetherContext, cands: Sequence[GeneratorCandidate]) -> StructureResult:
    sys = ctx.system
    n = len(cands)
    GL = [c.G_L for c in cands]
    fields = [c.V_L.renamed(f"VL{i + 1}") for i, c in enumerate(cands)]
    C = [[None] * n for _ in range(n)]
    constant, matched, mres = True, True, []
    for i in range(n):
        for j in range(n):
            target = fields[j].apply(GL[i])
            comb = _constant_combination(target, GL)
            if comb is None:
                constant = False
                r = ctx.reduce(target, GL)
                if not r.is_zero:
                    matched = False
                    mres.append(r.normal_form)
                    comb = list(r.combination)
                else:
                    comb = list(r.combination)
            C[i][j] = tuple(comb)
    rnd = ctx.random_functions()
    pres, bres = [], []
    for i in range(n):
        for j in range(i + 1, n):
            br = lie_bracket(fields[i], fields[j], sys.tangent_chart)
            gji = poisson_bracket(sys, cands[j].G_H, cands[i].G_H)
            for h in rnd:
                pres.append(br.apply(pull_back(sys, h)) - pull_back(sys, poisson_bracket(sys, h, gji)))
            if constant and matched:
                for z in sys.tangent_chart:
                    r = br.component(z)
                    for k in range(n):
                        r = r + C[i][j][k] * fields[k].component(z)
                    bres.append(r)
    return StructureResult(tuple(tuple(row) for row in C), constant, matched, tuple(mres),
                           tuple(pres), tuple(bres))
