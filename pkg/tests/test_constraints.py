from __future__ import annotations

import random

import pytest

from noether_kit.constraints import (
    InconsistentDynamics,
    StabilizationDepthExceeded,
    is_first_class_wrt_primaries,
    lagrangian_constraint_chain,
    stabilize_hamiltonian,
    velocity_free_constraints,
)
from noether_kit.expr import Num, is_zero, parse
from noether_kit.ideal import UnsupportedReduction, certificate_residual, reduce_mod, weak_equals
from noether_kit.sampling import random_polynomials

from conftest import legendre_of

REL = "exp(-w)*xdot^2/2 + exp(w)*m^2/2"


def P(lm, text):
    return parse(text, lm.system.table)


def test_relativistic_particle_chain():
    lm = legendre_of(["x", "w"], REL, ["m"])
    ch = stabilize_hamiltonian(lm)
    assert len(ch.levels) == 2
    assert is_zero(ch.levels[0][0].expr - P(lm, "p_w"))
    assert is_zero(ch.levels[1][0].expr + lm.hamiltonian)
    assert not ch.determinations
    lc = lagrangian_constraint_chain(lm, ch)
    (chi,) = lc.exprs()
    assert is_zero(chi - P(lm, "(exp(w)*m^2 - exp(-w)*xdot^2)/2"))
    assert not velocity_free_constraints(lc)


def test_example2_chain_and_multiplier_determination():
    lm = legendre_of(["x", "y"], "xdot^2/2 - y^2/2")
    ch = stabilize_hamiltonian(lm)
    assert [[str(c.expr) for c in lvl] for lvl in ch.levels] == [["p_y"], ["-y"]]
    (det,) = ch.determinations
    (lam,) = det.free_symbols
    assert lam.name == "lam" and str(det) in ("lam", "-lam")
    lc = lagrangian_constraint_chain(lm, ch)
    assert [str(e) for e in lc.exprs()] == ["-y", "-ydot"]
    assert [str(e) for e in velocity_free_constraints(lc)] == ["-y"]


def test_depth_limit_and_inconsistency():
    lm = legendre_of(["x", "y"], "xdot^2/2 - y^2/2")
    with pytest.raises(StabilizationDepthExceeded):
        stabilize_hamiltonian(lm, max_depth=1)
    bad = legendre_of(["x", "y"], "xdot^2/2 + y")
    with pytest.raises(InconsistentDynamics):
        stabilize_hamiltonian(bad)


def test_chain_is_independent_of_primary_basis():
    # a rescaled or reordered primary basis spans the same ideal
    a = legendre_of(["x", "w"], REL, ["m"])
    b = legendre_of(["x", "w"], REL, ["m"], phis=["exp(w)*p_w"])
    ca, cb = stabilize_hamiltonian(a).exprs(), stabilize_hamiltonian(b).exprs()
    assert len(ca) == len(cb)
    for f in ca:
        assert reduce_mod(f, cb).is_zero
    for f in cb:
        assert reduce_mod(f, ca).is_zero
    c = legendre_of(["x", "y", "z"], "xdot^2/2 - y^2/2 - z^2/2", phis=["p_z", "p_y"])
    d = legendre_of(["x", "y", "z"], "xdot^2/2 - y^2/2 - z^2/2", phis=["p_y", "p_z"])
    cc, cd = stabilize_hamiltonian(c).exprs(), stabilize_hamiltonian(d).exprs()
    assert sorted(map(str, cc)) == sorted(map(str, cd))


def test_reduce_mod_certificate_round_trip():
    lm = legendre_of(["x", "w"], REL, ["m"])
    chain = stabilize_hamiltonian(lm).exprs()
    s = lm.system
    polys = random_polynomials(list(s.coordinates) + list(s.momenta), 12, 21)
    for i in range(10):
        f = polys[i] * chain[0] + polys[i + 1] * chain[1]
        red = reduce_mod(f, chain)
        assert red.is_zero
        assert is_zero(certificate_residual(f, chain, red))
        total = red.normal_form + sum((c * g for c, g in zip(red.combination, chain)), Num(0))
        assert is_zero(total - f)


def test_reduce_mod_nonmember_keeps_remainder():
    lm = legendre_of(["x", "y"], "xdot^2/2 - y^2/2")
    chain = [P(lm, "p_y"), P(lm, "-y")]
    red = reduce_mod(P(lm, "x + y*p_x"), chain)
    assert not red.is_zero and is_zero(red.normal_form - P(lm, "x"))
    assert weak_equals(P(lm, "x + y^2"), P(lm, "x"), chain)
    assert not weak_equals(P(lm, "x + 1"), P(lm, "x"), chain)


def test_first_class_check():
    lm = legendre_of(["x", "w"], REL, ["m"])
    assert is_first_class_wrt_primaries(lm, P(lm, "p_x")).first_class
    # {H, p_w} = -H vanishes only on the secondary constraint
    res = is_first_class_wrt_primaries(lm, lm.hamiltonian)
    assert not res.first_class and is_zero(res.residuals[0] - lm.hamiltonian)
    assert not is_first_class_wrt_primaries(lm, P(lm, "w")).first_class
