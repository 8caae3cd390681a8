from __future__ import annotations

import pytest

from noether_kit.expr import diff, is_zero
from noether_kit.noether import (
    NoetherContext,
    NoetherError,
    Verdict,
    analyze_candidate,
    make_candidate,
    solve_gauge_generator,
    strip_time_only,
    structure_functions,
)
from noether_kit.sampling import random_polynomials

from conftest import P, analysis, legendre_of


def ctx_of(coords, L, params=()):
    return NoetherContext.build(legendre_of(coords, L, params))


def run(ctx, text):
    return analyze_candidate(ctx, make_candidate(ctx.lmap, P(ctx, text), text))


def test_conserved_momentum_of_free_particle():
    ctx = ctx_of(["q"], "qdot^2/2")
    rep = run(ctx, "p_q")
    assert rep.noether is Verdict.PASS and rep.equivalence_holds
    assert rep.velocity_space.verdict is Verdict.PASS
    assert is_zero(rep.bar_delta.residual)


def test_nonconserved_candidate_fails_everywhere():
    ctx = ctx_of(["q"], "qdot^2/2 - q^2/2")
    rep = run(ctx, "p_q")
    assert rep.k_condition.verdict is Verdict.FAIL
    assert rep.phase_space.verdict is Verdict.FAIL
    assert rep.commutation.verdict is Verdict.FAIL
    assert rep.equivalence_holds and rep.implication_holds


def test_time_dependent_boost_passes():
    ctx = ctx_of(["q"], "qdot^2/2")
    rep = run(ctx, "q - t*p_q")
    assert rep.noether is Verdict.PASS
    assert rep.commutation.theorem3_ok


def test_time_only_residue_is_a_redefinition():
    ctx = ctx_of(["q"], "qdot^2/2")
    rep = run(ctx, "p_q + t")
    assert rep.noether is Verdict.PASS
    assert is_zero(rep.k_condition.redefinition - 1)
    f, rest = strip_time_only(P(ctx, "t^2 + p_q*t"))
    assert is_zero(f - P(ctx, "t^2")) and is_zero(rest - P(ctx, "p_q*t"))


def test_velocity_in_generator_rejected():
    ctx = ctx_of(["q"], "qdot^2/2")
    with pytest.raises(NoetherError):
        make_candidate(ctx.lmap, P(ctx, "qdot"))


def test_theorem3_identities_hold_for_random_candidates():
    an = analysis("relativistic_particle")
    ctx = an.ctx
    s = an.system
    for G in random_polynomials(list(s.coordinates) + list(s.momenta), 10, 3):
        rep = analyze_candidate(ctx, make_candidate(ctx.lmap, G))
        assert rep.commutation.theorem3_ok
        # second-order terms in h come with dK.G/dqdot
        kg_velocity_free = all(is_zero(diff(rep.k_condition.K_G, v)) for v in s.velocities)
        assert rep.commutation.first_order == kg_velocity_free
        assert all(is_zero(r) for r in rep.bar_delta.bar_relation_residuals)
        assert rep.equivalence_holds and rep.implication_holds


def test_noether_identity_for_passing_generator():
    an = analysis("relativistic_particle")
    rep = an.gauge[0].report
    bd = rep.bar_delta
    # d/dt G^L + [L]_i delta q^i equals delta-bar L minus the boundary derivative
    assert bd.verdict is Verdict.PASS
    assert all(is_zero(r) for r in bd.bar_relation_residuals)


def test_gauge_solver_with_and_without_rescaling():
    an = analysis("relativistic_particle")
    for seed in ("exp(-w)*p_w", "p_w"):
        sol = solve_gauge_generator(an.ctx, P(an, seed))
        assert sol.ok
        G = sol.candidate.G_H
        assert is_zero(G - P(an, "exp(-w)*(epsdot*p_w + eps*exp(w)*(p_x^2 - m^2)/2)"))
    assert any("rescaled" in n for n in solve_gauge_generator(an.ctx, P(an, "p_w")).notes)


def test_gauge_solver_rejects_bad_seeds():
    an = analysis("relativistic_particle")
    with pytest.raises(NoetherError):
        solve_gauge_generator(an.ctx, P(an, "p_x"))
    ctx = ctx_of(["q"], "qdot^2/2")
    with pytest.raises(NoetherError):
        solve_gauge_generator(ctx, P(ctx, "p_q"))


def test_gauge_family_is_abelian():
    an = analysis("relativistic_particle")
    assert an.structure is not None and an.structure.closes
    for row in an.structure.C:
        for comb in row:
            assert all(is_zero(c) for c in comb)


def test_rotation_structure_constants():
    an = analysis("relativistic_particle_3d")
    st = an.structure
    names = [r.candidate.name for r in an.reports] + ["gauge"]
    assert st.closes and st.constant
    i, j, k = names.index("px"), names.index("rotation"), names.index("py")
    # V^L_j . G^L_i = C^k_ij G^L_k with {p_x, x p_y - y p_x} = -p_y
    assert is_zero(st.C[i][j][k] + 1)
    assert is_zero(st.C[j][i][k] - 1)


def test_central_extension_is_reported_not_matched():
    an = analysis("free_particle")
    assert an.structure is not None and not an.structure.matched
    assert an.exit_status == 0
    assert any("do not close" in w for w in an.warnings)


def test_example2_velocity_space_weaker_than_noether():
    an = analysis("example2", ("p_y*y",))
    (rep,) = an.reports
    vs = rep.velocity_space
    assert vs.verdict is Verdict.PASS and vs.conditions_differ and vs.restricts_configuration
    assert rep.k_condition.verdict is Verdict.PARTIAL_NONPROJECTABLE
    assert rep.implication_holds
