"""Structured (JSON) and text reports of an analysis.

The text report is rendered from the same dictionary as the JSON report, so
both carry identical content.  Every expression is printed with the canonical
printer; the ``symbols`` list gives the kinds needed to re-parse them.
"""

from __future__ import annotations

import json
from typing import Any

from .expr import Expr, Symbol, SymbolKind, SymbolTable, to_string
from .ideal import ConstraintSet
from .noether import GaugeSolution, NoetherReport, StructureResult
from .pipeline import Analysis
from .vector_field import VectorField

SCHEMA_VERSION = "1.0"

CONVENTIONS = {
    "lie_bracket": "[V,X] = V o X - X o V",
    "poisson_bracket": "{f,g} = df/dq dg/dp - df/dp dg/dq",
    "kernel_basis": "gamma_mu = FL*(d phi_mu / d p)",
    "free_parameter_derivative": "D_<field>_<param> stands for <field> . <param>",
    "gauge_chain": "epsdot, epsddot, eps_d3, ... are successive time derivatives of eps",
}


class _Emitter:
    def __init__(self):
        self.symbols: dict[str, Symbol] = {}

    def e(self, x: Expr) -> str:
        for s in x.free_symbols:
            self.symbols.setdefault(s.name, s)
        return to_string(x)

    def many(self, xs) -> list[str]:
        return [self.e(x) for x in xs]

    def field(self, v: VectorField) -> dict:
        return {"name": v.name, "space": v.space.value,
                "components": {s.name: self.e(c) for s, c in v.components.items()},
                "free_parameters": [p.name for p in v.free_parameters]}

    def chain(self, cs: ConstraintSet) -> list[list[dict]]:
        return [[{"expr": self.e(c.expr), "solved_for": c.solved_for.name if c.solved_for else None,
                  "origin": c.origin} for c in lvl] for lvl in cs.levels]


def _noether(em: _Emitter, rep: NoetherReport) -> dict:
    c, k, ph, vs, cm, bd = (rep.candidate, rep.k_condition, rep.phase_space, rep.velocity_space,
                            rep.commutation, rep.bar_delta)
    demo = ph.commutator
    return {
        "name": c.name,
        "G_H": em.e(c.G_H),
        "G_L": em.e(c.G_L),
        "V_H": em.field(c.V_H),
        "V_L": em.field(c.V_L),
        "V_L_bar": em.field(c.V_L_bar),
        "noether": rep.noether.value,
        "equivalence_holds": rep.equivalence_holds,
        "implication_holds": rep.implication_holds,
        "k_condition": {"verdict": k.verdict.value, "K_G": em.e(k.K_G), "residual": em.e(k.residual),
                        "redefinition": em.e(k.redefinition), "plc_combination": em.many(k.plc_combination)},
        "phase_space": {
            "verdict": ph.verdict.value,
            "cond2": em.e(ph.cond2_expr),
            "cond2_residual": em.e(ph.cond2_residual),
            "cond2_phc_combination": em.many(ph.cond2_combination),
            "cond1_residuals": em.many(ph.cond1_residuals),
            "D": [em.many(row) for row in ph.D],
            "redefinition": em.e(ph.redefinition),
            "commutator": None if demo is None else {
                "bracket": em.field(demo.bracket),
                "phc_coefficients": em.many(demo.coefficients),
                "residuals": em.many(demo.residuals),
                "holds": demo.holds,
            },
        },
        "velocity_space": {
            "verdict": vs.verdict.value,
            "projection": vs.projection.value,
            "projection_residuals": em.many(vs.projection_residuals),
            "tangency": vs.tangency.value,
            "tangency_residuals": em.many(vs.tangency_residuals),
            "tangency_witnesses": [em.many(w) for w in vs.tangency_witnesses],
            "bracket_with_XL": vs.bracket_verdict.value,
            "bracket": em.field(vs.bracket),
            "beta": em.many(vs.beta),
            "bracket_remainder": em.many(vs.bracket_remainder),
            "necsuf": vs.necsuf,
            "nonecsuf": vs.nonecsuf,
            "conditions_differ": vs.conditions_differ,
            "constraints_restrict_configuration": vs.restricts_configuration,
        },
        "commutation_with_K": {
            "verdict": cm.verdict.value,
            "difference_operator": {z.name: em.e(v) for z, v in cm.coefficients.items()},
            "difference_is_first_order": cm.first_order,
            "family_residuals": em.many(cm.family_residuals),
            "random_residuals": em.many(cm.random_residuals),
            "pullback_commutation_residuals": em.many(cm.pullback_residuals),
            "theorem3_q": em.many(cm.theorem3_q),
            "theorem3_v": em.many(cm.theorem3_v),
            "theorem3_holds": cm.theorem3_ok,
        },
        "bar_delta": {
            "verdict": bd.verdict.value,
            "bar_delta_L": em.e(bd.bar_delta_L),
            "boundary": em.e(bd.boundary),
            "residual": em.e(bd.residual),
            "delta_L_L": em.e(bd.delta_L_L),
            "noether_identity_residual": em.e(bd.noether_identity_residual),
            "bar_relation_residuals": em.many(bd.bar_relation_residuals),
        },
    }


def _gauge(em: _Emitter, seed_text: str, sol: GaugeSolution, rep: NoetherReport | None) -> dict:
    return {
        "seed": seed_text,
        "ok": sol.ok,
        "seed_used": em.e(sol.seed),
        "generator": em.e(sol.candidate.G_H) if sol.candidate else None,
        "components": em.many(sol.components),
        "chain_decomposition": [em.many(d) for d in sol.decompositions],
        "obstruction": em.many(sol.obstruction),
        "notes": list(sol.notes),
        "noether": None if rep is None else _noether(em, rep),
    }


def _structure(em: _Emitter, st: StructureResult | None) -> dict | None:
    if st is None:
        return None
    return {"C": [[em.many(k) for k in row] for row in st.C], "constant": st.constant, "matched": st.matched,
            "match_residuals": em.many(st.match_residuals),
            "projection_residuals": em.many(st.projection_residuals),
            "bracket_residuals": em.many(st.bracket_residuals),
            "closes": st.closes,
            "convention": "V^L_j . G^L_i = C^k_ij G^L_k; [V^L_i, V^L_j] = -C^k_ij V^L_k"}


def build_report(an: Analysis) -> dict[str, Any]:
    em = _Emitter()
    sysm, lmap = an.system, an.lmap
    body: dict[str, Any] = {
        "system": sysm.name,
        "coordinates": [q.name for q in sysm.coordinates],
        "parameters": [p.name for p in sysm.parameters],
        "lagrangian": em.e(sysm.lagrangian),
        "momenta": {p.name: em.e(e) for p, e in zip(sysm.momenta, sysm.momenta_hat)},
        "hessian": [em.many(r) for r in sysm.hessian.rows],
        "kernel_null_space": [em.many(v) for v in sysm.kernel.vectors],
        "kernel_aligned": [em.many(v) for v in lmap.gammas],
        "kernel_alignment_matrix": [em.many(r) for r in lmap.alignment.rows],
        "alpha": em.many(sysm.alpha),
        "euler_lagrange": {q.name: em.e(e) for q, e in zip(sysm.coordinates, sysm.euler_lagrange)},
        "primary_constraints": {"exprs": em.many(lmap.phis), "derived": lmap.phis_derived},
        "hamiltonian": {"expr": em.e(lmap.hamiltonian), "derived": lmap.hamiltonian_derived,
                        "verified": lmap.hamiltonian_check.ok,
                        "modulo_constraints": lmap.hamiltonian_check.modulo_constraints,
                        "residual": em.e(lmap.hamiltonian_check.residual)},
        "v_multipliers": em.many(lmap.v),
        "hamiltonian_chain": em.chain(an.hchain),
        "multiplier_determinations": em.many(an.hchain.determinations),
        "lagrangian_chain": em.chain(an.lchain),
        "evolution": {"X_L": em.field(an.ctx.xl.field), "X_H": em.field(an.ctx.xh.field),
                      "X_L_compatibility": em.many(an.ctx.xl.compatibility)},
        "generators": [_noether(em, r) for r in an.reports],
        "gauge": [_gauge(em, g.seed_text, g.solution, g.report) for g in an.gauge],
        "structure_functions": _structure(em, an.structure),
        "warnings": list(an.warnings),
    }
    failures = an.failures()
    verdicts = {r.candidate.name: r.noether.value for r in an.reports}
    verdicts.update({f"gauge:{g.seed_text}": ("PASS" if g.solution.ok and g.report is not None
                                              and g.report.noether.value == "PASS" else "FAIL")
                     for g in an.gauge})
    symbols = [{"name": s.name, "kind": s.kind.value, "base": s.base, "order": s.order}
               for s in sorted(em.symbols.values(), key=lambda s: s.name)]
    return {"schema_version": SCHEMA_VERSION, "conventions": CONVENTIONS, "symbols": symbols, **body,
            "summary": {"verdicts": verdicts, "failures": failures, "exit_status": 1 if failures else 0}}


def table_from_report(report: dict) -> SymbolTable:
    """A symbol table that re-parses every expression of ``report``."""
    extra = [Symbol(s["name"], SymbolKind(s["kind"]), s["base"], s["order"]) for s in report["symbols"]
             if s["kind"] != SymbolKind.TIME.value]
    return SymbolTable(extra=extra)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _text(value, indent: int, out: list[str], key: str | None = None) -> None:
    pad = "  " * indent
    label = f"{key}: " if key is not None else "- "
    if isinstance(value, dict) and key is None and value and \
            all(not isinstance(v, (dict, list)) for v in value.values()):
        out.append(f"{pad}- " + ", ".join(f"{k}={_scalar(v)}" for k, v in value.items()))
    elif isinstance(value, dict):
        if not value:
            out.append(f"{pad}{label}{{}}")
            return
        out.append(f"{pad}{label.rstrip()}" if key is not None else f"{pad}-")
        for k, v in value.items():
            _text(v, indent + 1, out, str(k))
    elif isinstance(value, list):
        if not value:
            out.append(f"{pad}{label}[]")
            return
        if all(not isinstance(v, (dict, list)) for v in value):
            out.append(f"{pad}{label}[" + ", ".join(_scalar(v) for v in value) + "]")
            return
        out.append(f"{pad}{label.rstrip()}" if key is not None else f"{pad}-")
        for v in value:
            _text(v, indent + 1, out)
    else:
        out.append(f"{pad}{label}{_scalar(value)}")


def _scalar(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def to_text(report: dict) -> str:
    out = [f"noether-kit analysis of {report['system']} (schema {report['schema_version']})", ""]
    for k, v in report.items():
        if k in ("schema_version", "system"):
            continue
        _text(v, 0, out, k)
    return "\n".join(out) + "\n"


def iter_expressions(report: dict):
    """Every expression string of the report (for round-trip checks)."""
    skip = {"schema_version", "conventions", "symbols", "warnings", "summary", "system", "coordinates",
            "parameters", "notes", "seed", "name", "space", "free_parameters", "origin", "solved_for",
            "convention", "verdict", "noether", "projection", "tangency", "bracket_with_XL"}

    def walk(v, key=None):
        if key in skip:
            return
        if isinstance(v, dict):
            for k, x in v.items():
                yield from walk(x, k)
        elif isinstance(v, list):
            for x in v:
                yield from walk(x, key)
        elif isinstance(v, str):
            yield v

    yield from walk(report)
