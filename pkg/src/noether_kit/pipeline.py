"""End-to-end analysis of one declared system."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .constraints import lagrangian_constraint_chain, stabilize_hamiltonian, velocity_free_constraints
from .declaration import SystemDeclaration
from .expr import ExprError, ParseError, is_zero, parse
from .ideal import ConstraintSet, UnsupportedReduction
from .legendre import LegendreMap, build_legendre
from .noether import (GaugeSolution, NoetherContext, NoetherReport, StructureResult, Verdict,
                      analyze_candidate, make_candidate, solve_gauge_generator, structure_functions)
from .system import SystemModel, build_system


class PipelineError(RuntimeError):
    def __init__(self, module: str, message: str):
        self.module = module
        super().__init__(f"[{module}] {message}")


@dataclass
class GaugeRun:
    seed_text: str
    solution: GaugeSolution
    report: NoetherReport | None


@dataclass
class Analysis:
    declaration: SystemDeclaration
    system: SystemModel
    lmap: LegendreMap
    hchain: ConstraintSet
    lchain: ConstraintSet
    ctx: NoetherContext
    reports: list[NoetherReport] = field(default_factory=list)
    gauge: list[GaugeRun] = field(default_factory=list)
    structure: StructureResult | None = None
    warnings: list[str] = field(default_factory=list)

    def failures(self) -> list[str]:
        out = []
        for r in self.reports:
            if r.noether is not Verdict.PASS:
                out.append(f"generator {r.candidate.name}: K-condition {r.k_condition.verdict.value}")
            if not r.equivalence_holds:
                out.append(f"generator {r.candidate.name}: characterizations disagree")
            if not r.implication_holds:
                out.append(f"generator {r.candidate.name}: K-condition PASS without velocity-space PASS")
        for g in self.gauge:
            if not g.solution.ok:
                out.append(f"gauge seed {g.seed_text}: no generator found")
            elif g.report is not None and g.report.noether is not Verdict.PASS:
                out.append(f"gauge seed {g.seed_text}: solved generator fails the K-condition")
        if self.structure is not None and self.structure.matched and not self.structure.closes:
            out.append("structure functions: bracket relation failed")
        return out

    @property
    def exit_status(self) -> int:
        return 1 if self.failures() else 0


def _stage(module: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, ExprError, UnsupportedReduction, RuntimeError) as exc:
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(module, str(exc)) from exc


def run_analysis(decl: SystemDeclaration, generators: Sequence[str] = (), gauge_seeds: Sequence[str] = (),
                 max_depth: int | None = None, ansatz_degree: int | None = None,
                 seed: int | None = None, n_random: int = 10) -> Analysis:
    opts = decl.options
    max_depth = opts["max_stabilization_depth"] if max_depth is None else max_depth
    ansatz_degree = opts["ansatz_degree"] if ansatz_degree is None else ansatz_degree
    seed = opts["probe_seed"] if seed is None else seed
    table = _stage("cli", decl.table)
    L = _stage("cli", decl.parse_field, "lagrangian", decl.lagrangian, table)
    sysm = _stage("system_model", build_system, decl.name, table, L)
    H = _stage("cli", decl.parse_field, "hamiltonian", decl.hamiltonian, table) if decl.hamiltonian else None
    phis = None
    if decl.primary_constraints is not None:
        phis = [_stage("cli", decl.parse_field, "primary_constraints", t, table) for t in decl.primary_constraints]
    lmap = _stage("legendre", build_legendre, sysm, H, phis)
    hchain = _stage("constraint_algebra", stabilize_hamiltonian, lmap, max_depth, ansatz_degree)
    lchain = _stage("constraint_algebra", lagrangian_constraint_chain, lmap, hchain, ansatz_degree)
    ctx = NoetherContext.build(lmap, hchain, lchain, max_depth, ansatz_degree, seed, n_random)
    out = Analysis(decl, sysm, lmap, hchain, lchain, ctx)
    out.warnings.extend(f"rank: {w}" for w in sysm.warnings)
    out.warnings.extend(lmap.warnings)
    if lmap.hamiltonian_check.modulo_constraints:
        out.warnings.append("hamiltonian accepted modulo primary constraints")
    if velocity_free_constraints(lchain):
        out.warnings.append("Lagrangian constraints restrict the configuration variables alone; "
                            "the velocity-space conditions are weaker than the Noether conditions")
    specs = [(g.name, g.expr, None) for g in decl.generators]
    specs += [(f"arg{i + 1}", text, "--generator") for i, text in enumerate(generators)]
    for name, text, flag in specs:
        G = _parse(decl, table, "generators", text, flag)
        cand = _stage("noether", make_candidate, lmap, G, name)
        rep = _stage("noether", analyze_candidate, ctx, cand)
        out.reports.append(rep)
        _note_redefinitions(out, rep)
    depth = opts["gauge_depth"]
    seeds = [(t, None) for t in decl.gauge_seeds] + [(t, "--solve-gauge") for t in gauge_seeds]
    for i, (text, flag) in enumerate(seeds):
        s = _parse(decl, table, "gauge_seeds", text, flag)
        sol = _stage("noether", solve_gauge_generator, ctx, s, depth, None, f"gauge{i + 1}")
        rep = _stage("noether", analyze_candidate, ctx, sol.candidate) if sol.ok else None
        out.gauge.append(GaugeRun(text, sol, rep))
        out.warnings.extend(f"gauge seed {text}: {n}" for n in sol.notes)
        if rep is not None:
            _note_redefinitions(out, rep)
    passing = [r.candidate for r in out.reports if r.noether is Verdict.PASS]
    passing += [g.report.candidate for g in out.gauge if g.report is not None and g.report.noether is Verdict.PASS]
    if len(passing) >= 2:
        out.structure = _stage("noether", structure_functions, ctx, passing)
        if not out.structure.matched:
            out.warnings.append("the passing generators do not close under the bracket; "
                                "no structure functions reported")
    return out


def _parse(decl: SystemDeclaration, table, key: str, text: str, flag: str | None):
    if flag is None:
        return _stage("cli", decl.parse_field, key, text, table)
    try:
        return parse(text, table)
    except ParseError as exc:
        raise PipelineError("cli", f"{flag} {text!r}: {exc}") from exc


def _note_redefinitions(out: Analysis, rep: NoetherReport) -> None:
    for label, e in (("K.G", rep.k_condition.redefinition), ("dG/dt + {G,H}", rep.phase_space.redefinition)):
        if not is_zero(e):
            out.warnings.append(f"generator {rep.candidate.name}: time-only residue {e} of {label} "
                                f"removed (G -> G - integral of f(t) dt)")
