"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line and asserts the
whole criterion in under five seconds, timing the full computation from the
declaration onward.  "match" is always ``is_zero`` of a difference.
"""

from __future__ import annotations

import random
import time

import pytest

from noether_kit.declaration import load
from noether_kit.evolution import apply_K, hamiltonian_field, lie_bracket, poisson_bracket
from noether_kit.expr import Num, Sym, diff, evaluate, free_derivative, free_parameter, is_zero, parse
from noether_kit.ideal import reduce_mod
from noether_kit.legendre import pull_back
from noether_kit.noether import (
    NoetherContext,
    Verdict,
    analyze_candidate,
    check_commutation_with_K,
    commutation_difference,
    make_candidate,
    solve_gauge_generator,
)
from noether_kit.pipeline import run_analysis
from noether_kit.sampling import random_polynomials
from noether_kit.selftest import _with_expected_inputs, bundled_fixtures, identity_suite
from noether_kit.system import total_time_derivative
from noether_kit.vector_field import time_partial

from conftest import SYSTEMS, legendre_of

LIMIT = 5.0


class Criterion:
    """Collects named sub-checks so a failure names exactly what broke."""

    def __init__(self, number: int):
        self.number = number
        self.failed: list[str] = []
        self.start = time.perf_counter()

    def check(self, what: str, ok: bool) -> None:
        if not ok:
            self.failed.append(what)

    def finish(self, capsys) -> None:
        elapsed = time.perf_counter() - self.start
        if elapsed >= LIMIT:
            self.failed.append(f"took {elapsed:.2f}s (limit {LIMIT:.0f}s)")
        verdict = "PASS" if not self.failed else "FAIL"
        with capsys.disabled():
            line = f"criterion {self.number}: {verdict} ({elapsed:.2f}s)"
            if self.failed:
                line += " failed: " + "; ".join(self.failed)
            print("\n" + line)
        assert not self.failed, self.failed


def fresh(name: str, generators=(), seeds=()):
    return run_analysis(load(SYSTEMS / f"{name}.toml"), generators, seeds)


def same(a, b) -> bool:
    return is_zero(a - b)


# criterion 1: Example 1 derivation suite

def test_criterion_1_example1_derivation(capsys):
    c = Criterion(1)
    an = fresh("relativistic_particle")
    s, lm = an.system, an.lmap
    P = lambda text: parse(text, s.table)
    c.check("p_x hat", same(s.momenta_hat[0], P("exp(-w)*xdot")))
    c.check("p_w hat", same(s.momenta_hat[1], Num(0)))
    energy = sum((Sym(v) * ph for v, ph in zip(s.velocities, s.momenta_hat)), Num(0)) - s.lagrangian
    c.check("H verified against energy", same(pull_back(s, lm.hamiltonian), energy) and lm.hamiltonian_check.ok)
    chain = an.hchain
    c.check("phi0 = p_w", len(chain.level(0)) == 1 and same(chain.level(0)[0], P("p_w")))
    c.check("phi1 = -H", len(chain.level(1)) == 1 and same(chain.level(1)[0], -lm.hamiltonian))
    chi = P("(exp(w)*m^2 - exp(-w)*xdot^2)/2")
    lchis = an.lchain.exprs()
    c.check("chi", len(lchis) == 1 and same(lchis[0], chi))
    k_phi1 = apply_K(lm, chain.level(1)[0])
    c.check("K.phi1 = wdot*chi", same(k_phi1, P("wdot") * chi))
    c.check("K.phi1 reduces to 0 mod chi", reduce_mod(k_phi1, [chi]).is_zero)
    (gamma,) = lm.kernel_fields
    c.check("Gamma = d/dwdot", set(gamma.components) == {s.velocities[1]} and
            same(gamma.component(s.velocities[1]), Num(1)))
    c.check("[L]_x", same(s.euler_lagrange[0], P("exp(-w)*(wdot*xdot - xddot)")))
    c.check("[L]_w = chi", same(s.euler_lagrange[1], chi))
    c.finish(capsys)


# criterion 2: Example 1 Noether suite

def _example1_gauge():
    an = fresh("relativistic_particle")
    s = an.system
    sol = solve_gauge_generator(an.ctx, parse("exp(-w)*p_w", s.table), 1)
    rep = analyze_candidate(an.ctx, sol.candidate) if sol.ok else None
    return an, sol, rep


def _beta_by_hand(an, cand):
    """The d/dwdot component of [V^L, X^L] from the definitions.

    X^L = d/dt + xdot d/dx + wdot d/dw + wdot xdot d/dxdot + eta d/dwdot, so
    the component is V^L(eta) - X^L(V^L_wdot), with V^L(eta) the opaque
    atom D_VL_eta.
    """
    s = an.system
    x, w = s.coordinates
    xd, wd = s.velocities
    eta = free_parameter("eta")
    vw = cand.V_L.component(wd)
    xl_of = lambda f: (time_partial(f) + Sym(xd) * diff(f, x) + Sym(wd) * diff(f, w)
                       + Sym(wd) * Sym(xd) * diff(f, xd) + Sym(eta) * diff(f, wd))
    return Sym(free_derivative("VL", eta)) - xl_of(vw)


def test_criterion_2_example1_noether(capsys):
    c = Criterion(2)
    an, sol, rep = _example1_gauge()
    s = an.system
    P = lambda text: parse(text, s.table.extended([free_parameter("eta"), free_derivative("VL", free_parameter("eta"))]))
    c.check("gauge generator found", sol.ok and rep is not None)
    if rep is None:
        c.finish(capsys)
        return
    cand = rep.candidate
    phi0, phi1 = an.hchain.level(0)[0], an.hchain.level(1)[0]
    target = P("exp(-w)") * (P("epsdot") * phi0 - P("eps") * phi1)
    c.check("G weakly equal to exp(-w)(epsdot phi0 - eps phi1)",
            reduce_mod(cand.G_H - target, an.hchain.exprs()).is_zero)
    c.check("K-condition PASS", rep.k_condition.verdict is Verdict.PASS)
    cm = rep.commutation
    c.check("commutation difference identically 0",
            all(is_zero(v) for v in cm.coefficients.values())
            and all(is_zero(r) for r in cm.family_residuals + cm.random_residuals))
    ph = rep.phase_space
    c.check("phase-space PASS with commutator structure",
            ph.verdict is Verdict.PASS and ph.commutator is not None and ph.commutator.holds)
    vs = rep.velocity_space
    c.check("[V^L, X^L] proportional to Gamma", vs.bracket_verdict is Verdict.PASS)
    (beta,) = vs.beta
    literal = P("exp(-w)*(-eps_d3 + 2*epsddot*wdot - epsdot*wdot^2 + epsdot*exp(-w)*eta + D_VL_eta)")
    c.check("beta matches the stated closed form", same(beta, literal))
    bar = cand.V_L_bar - cand.V_L
    xd = s.velocities[0]
    rel = [same(bar.component(z), -P("eps") * s.euler_lagrange[0] if z == xd else Num(0))
           for z in s.tangent_chart]
    c.check("V-bar^L = V^L - eps [L]_x d/dxdot", all(rel))
    c.check("delta-bar L = d/dt(eps exp(-w) L)",
            same(rep.bar_delta.bar_delta_L, total_time_derivative(s, P("eps*exp(-w)") * s.lagrangian)))
    c.finish(capsys)


def test_example1_beta_from_the_definitions():
    # the bracket coefficient recomputed by hand from V^L and X^L
    an, sol, rep = _example1_gauge()
    (beta,) = rep.velocity_space.beta
    assert same(beta, _beta_by_hand(an, rep.candidate))
    s = an.system
    eta = free_parameter("eta")
    t = s.table.extended([eta, free_derivative("VL", eta)])
    derived = parse("exp(-w)*(-eps_d3 + 2*epsddot*wdot - epsdot*wdot^2 + epsdot*eta) + D_VL_eta", t)
    assert same(beta, derived)


# criterion 3: Example 2 negative suite

def test_criterion_3_example2_negative(capsys):
    c = Criterion(3)
    an = fresh("example2", ("p_y*y", "p_x + p_y*y"))
    s, lm = an.system, an.lmap
    P = lambda text: parse(text, s.table)
    c.check("phi0 = p_y", [str(e) for e in an.hchain.level(0)] == ["p_y"])
    c.check("phi1 = -y", len(an.hchain.level(1)) == 1 and same(an.hchain.level(1)[0], P("-y")))
    chis = an.lchain.exprs()
    c.check("chi1 = -y, chi2 = -ydot",
            len(chis) == 2 and same(chis[0], P("-y")) and same(chis[1], P("-ydot")))
    g1, g2 = an.reports
    vs = g1.velocity_space
    c.check("velocity-space sub-verdicts all PASS",
            (vs.projection, vs.tangency, vs.bracket_verdict) == (Verdict.PASS,) * 3)
    k = g1.k_condition
    c.check("K-condition PARTIAL-NONPROJECTABLE", k.verdict is Verdict.PARTIAL_NONPROJECTABLE)
    c.check("K residual exactly -y^2", same(k.residual, P("-y^2")))
    coeffs = g1.commutation.coefficients
    py = s.momenta[1]
    c.check("difference operator = -2y FL*(d/dp_y)",
            same(coeffs[py], P("-2*y")) and all(is_zero(v) for z, v in coeffs.items() if z != py))
    ok = True
    for h in random_polynomials(list(s.coordinates) + list(s.momenta), 10, 77):
        d = commutation_difference(an.ctx, g1.candidate, h)
        ok = ok and same(d, P("-2*y") * pull_back(s, diff(h, py)))
    c.check("difference acts as -2y FL*(dh/dp_y) on random h", ok)
    bd = g1.bar_delta
    c.check("delta-bar L = -y^2, not a total derivative",
            same(bd.bar_delta_L, P("-y^2")) and bd.verdict is Verdict.FAIL)
    c.check("p_x + p_y y: Noether FAIL", g2.noether is Verdict.FAIL)
    c.check("p_x + p_y y: delta^L L = -y^2", same(g2.bar_delta.delta_L_L, P("-y^2")))
    c.finish(capsys)


# criterion 4: regular limit

def _random_regular_lagrangian(seed: int) -> str:
    rng = random.Random(seed)
    a, b = rng.randint(1, 3), rng.randint(-2, 2)
    d = b * b + rng.randint(1, 3)  # a*d - b^2 > 0 after scaling below
    d = (d + a - 1) // a if a > 1 else d
    e, f = rng.randint(-2, 2), rng.randint(1, 3)
    return (f"{a}*xdot^2/2 + {b}*xdot*ydot + {d}*ydot^2/2 + {e}*x*ydot"
            f" - {f}*x^2/2 - y^2*x/3 - y^2/2")


def _flow_oracle(lm, hs, steps=40, dt=0.01) -> bool:
    """RK4 on Hamilton's equations with finite-difference gradients of H.

    Along the flow, K.h at (q, qdot) must equal d/dt h(q, p).
    """
    s = lm.system
    H = lm.hamiltonian
    names = [z.name for z in s.coordinates + s.momenta]
    n = s.dim

    def Hval(z):
        return evaluate(H, {sym: z[names.index(sym.name)] for sym in H.free_symbols})

    def rhs(z):
        g = []
        for i in range(2 * n):
            up, dn = list(z), list(z)
            up[i] += 1e-6
            dn[i] -= 1e-6
            g.append((Hval(up) - Hval(dn)) / 2e-6)
        return g[n:] + [-x for x in g[:n]]

    def step(z, h):
        k1 = rhs(z)
        k2 = rhs([a + h / 2 * b for a, b in zip(z, k1)])
        k3 = rhs([a + h / 2 * b for a, b in zip(z, k2)])
        k4 = rhs([a + h * b for a, b in zip(z, k3)])
        return [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(z, k1, k2, k3, k4)]

    z = [0.4, 0.7, 0.3, -0.2][: 2 * n] if n == 2 else [0.5, 0.3]
    traj = [z]
    for _ in range(steps):
        traj.append(step(traj[-1], dt))
    mid = steps // 2
    zc = traj[mid]
    qdot = rhs(zc)[:n]
    env = {sym.name: v for sym, v in zip(s.coordinates + s.momenta, zc)}
    env.update({v.name: x for v, x in zip(s.velocities, qdot)})
    env["t"] = mid * dt
    for h in hs:
        k = apply_K(lm, h)
        hv = lambda zz, tt: evaluate(h, {sym: (tt if sym.name == "t" else zz[names.index(sym.name)])
                                         for sym in h.free_symbols})
        fd = (hv(traj[mid + 1], (mid + 1) * dt) - hv(traj[mid - 1], (mid - 1) * dt)) / (2 * dt)
        exact = evaluate(k, {sym: env[sym.name] for sym in k.free_symbols})
        if abs(exact - fd) > 1e-3 * max(1.0, abs(fd)):
            return False
    return True


def test_criterion_4_regular_limit(capsys):
    c = Criterion(4)
    for label, coords, L in (("L = qdot^2/2", ["q"], "qdot^2/2"),
                             ("random regular", ["x", "y"], _random_regular_lagrangian(20240611))):
        lm = legendre_of(coords, L)
        s = lm.system
        ctx = NoetherContext.build(lm)
        c.check(f"{label}: no constraints", not lm.phis and not ctx.hchain.exprs() and not ctx.lchain.exprs())
        c.check(f"{label}: no kernel", not s.kernel.vectors)
        tsym = parse("t", s.table)
        hs = random_polynomials(list(s.coordinates) + list(s.momenta), 10, 4)
        hs = hs + [h * tsym for h in hs[:3]]
        ok = all(same(apply_K(lm, h), pull_back(s, time_partial(h) + poisson_bracket(s, h, lm.hamiltonian)))
                 for h in hs)
        c.check(f"{label}: K.h = FL*(dh/dt + {{h,H}})", ok)
        c.check(f"{label}: Hamiltonian-flow oracle", _flow_oracle(lm, hs[:5]))
    lm = legendre_of(["q"], "qdot^2/2")
    ctx = NoetherContext.build(lm)
    for G in ("p_q", "q - t*p_q", "p_q^2/2"):
        rep = analyze_candidate(ctx, make_candidate(lm, parse(G, lm.system.table), G))
        br = rep.velocity_space.bracket
        c.check(f"{G}: conserved", rep.noether is Verdict.PASS)
        c.check(f"{G}: [V,X] = 0", br.is_zero() and rep.velocity_space.verdict is Verdict.PASS)
    lm = legendre_of(["x", "y"], _random_regular_lagrangian(20240611))
    ctx = NoetherContext.build(lm)
    rep = analyze_candidate(ctx, make_candidate(lm, lm.hamiltonian, "H"))
    c.check("random regular, G = H: [V,X] = 0",
            rep.noether is Verdict.PASS and rep.velocity_space.bracket.is_zero())
    rep = analyze_candidate(ctx, make_candidate(lm, parse("p_x", lm.system.table), "p_x"))
    c.check("random regular, G = p_x: not conserved and [V,X] != 0",
            rep.noether is Verdict.FAIL and not rep.velocity_space.bracket.is_zero())
    c.finish(capsys)


# criterion 5: identity property suites

def test_criterion_5_identity_suites(capsys):
    c = Criterion(5)
    n_cands = 0
    for path in bundled_fixtures():
        an = run_analysis(_with_expected_inputs(load(path)))
        name = an.system.name
        for ident, ok in identity_suite(an, n=10).items():
            c.check(f"{name}: {ident}", ok)
        s = an.system
        chart = list(s.coordinates) + list(s.momenta)
        cands = [r.candidate for r in an.reports] + [g.report.candidate for g in an.gauge if g.report]
        cands += [make_candidate(an.lmap, G, f"r{i}") for i, G in enumerate(random_polynomials(chart, 2, 99))]
        n_cands += len(cands)
        for cand in cands:
            cm = check_commutation_with_K(an.ctx, cand)
            family_ok = all(is_zero(r) for r in cm.family_residuals)
            random_ok = all(is_zero(r) for r in cm.random_residuals)
            c.check(f"{name}/{cand.name}: generating family decides like random h", family_ok == random_ok)
            c.check(f"{name}/{cand.name}: KG/q'' and KG/v''", cm.theorem3_ok)
        fs = random_polynomials(chart, 8, 5)
        fields = [hamiltonian_field(s, f, f"V{i}") for i, f in enumerate(fs)]
        pc = s.phase_chart
        ok_anti = ok_jac = True
        for a, b, d in zip(fields[:6], fields[1:7], fields[2:8]):
            ok_anti = ok_anti and (lie_bracket(a, b, pc) + lie_bracket(b, a, pc)).is_zero()
            jac = (lie_bracket(a, lie_bracket(b, d, pc), pc) + lie_bracket(b, lie_bracket(d, a, pc), pc)
                   + lie_bracket(d, lie_bracket(a, b, pc), pc))
            ok_jac = ok_jac and jac.is_zero()
        c.check(f"{name}: Lie antisymmetry", ok_anti)
        c.check(f"{name}: Lie Jacobi", ok_jac)
    c.check("at least 10 candidates for the generating-family and KG identities", n_cands >= 10)
    c.finish(capsys)


# criterion 6: theorem-equivalence battery

def test_criterion_6_equivalence_battery(capsys):
    c = Criterion(6)
    n = 0
    for path in bundled_fixtures():
        an = run_analysis(_with_expected_inputs(load(path)))
        reps = list(an.reports) + [g.report for g in an.gauge if g.report is not None]
        for rep in reps:
            n += 1
            tag = f"{an.system.name}/{rep.candidate.name}"
            c.check(f"{tag}: K <=> phase space <=> commutation", rep.equivalence_holds)
            c.check(f"{tag}: K PASS => velocity-space PASS", rep.implication_holds)
    c.check("battery is not empty", n >= 8)
    an = fresh("example2", ("p_y*y",))
    (rep,) = an.reports
    c.check("velocity-space PASS does not imply K PASS",
            rep.velocity_space.verdict is Verdict.PASS and rep.k_condition.verdict is not Verdict.PASS)
    c.finish(capsys)
