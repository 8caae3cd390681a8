"""Golden-fixture checks and seeded identity suites behind ``noether-kit self-test``."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, TextIO

from .declaration import GeneratorSpec, SystemDeclaration, load, loads
from .evolution import apply_K, apply_K_el_form, apply_K_h_form, poisson_bracket
from .expr import Expr, Sym, canonical, is_zero, parse, to_string
from .ideal import reduce_mod
from .legendre import pull_back
from .noether import NoetherReport, Verdict
from .pipeline import Analysis, run_analysis
from .sampling import DEFAULT_SEED, random_polynomials
from .system import primary_lagrangian_constraints

ROWS = ("derivation", "KG", "T1", "T2", "T3", "T4", "T5", "noether-identity", "gauge", "identities")

ROW_TITLES = {
    "derivation": "momenta, H, constraint chains, [L]",
    "KG": "K.G = 0 condition",
    "T1": "Theorem 1: phase-space conditions",
    "T2": "Theorem 2: generating family",
    "T3": "Theorem 3: KG/q'' and KG/v''",
    "T4": "Theorem 4: equivalence of characterizations",
    "T5": "Theorem 5: velocity-space trio (one-way)",
    "noether-identity": "delta-bar L total derivative",
    "gauge": "gauge generator solver",
    "identities": "randomized identity suites",
}


@dataclass
class FixtureResult:
    name: str
    rows: dict = field(default_factory=dict)
    diffs: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.rows.values())

    def mark(self, row: str, ok: bool) -> None:
        self.rows[row] = self.rows.get(row, True) and ok


def bundled_fixtures() -> list[str]:
    root = resources.files("noether_kit") / "data"
    return sorted(str(p) for p in root.iterdir() if p.name.endswith(".toml"))


def _with_expected_inputs(decl: SystemDeclaration) -> SystemDeclaration:
    gens = list(decl.generators)
    names = {g.name for g in gens}
    for name, spec in decl.expected.get("generators", {}).items():
        if "expr" in spec and name not in names:
            gens.append(GeneratorSpec(name, spec["expr"]))
    seeds = list(decl.gauge_seeds)
    for g in decl.expected.get("gauge", []):
        if g["seed"] not in seeds:
            seeds.append(g["seed"])
    return dataclasses.replace(decl, generators=gens, gauge_seeds=seeds)


def _same(res: FixtureResult, row: str, what: str, expected: str, got: Expr, table) -> None:
    exp = parse(expected, table)
    ok = is_zero(exp - got)
    res.mark(row, ok)
    if not ok:
        res.diffs.append((what, to_string(canonical(exp)), to_string(got)))


def _same_list(res, row, what, expected: list, got: list, table) -> None:
    if len(expected) != len(got):
        res.mark(row, False)
        res.diffs.append((what, f"{len(expected)} entries", f"{len(got)} entries: "
                          + ", ".join(to_string(g) for g in got)))
        return
    for i, (e, g) in enumerate(zip(expected, got)):
        _same(res, row, f"{what}[{i}]", e, g, table)


def _verdict(res, row, what, expected: str, got: Verdict) -> None:
    ok = expected == got.value
    res.mark(row, ok)
    if not ok:
        res.diffs.append((what, expected, got.value))


def identity_suite(an: Analysis, seed: int = DEFAULT_SEED, n: int = 10) -> dict[str, bool]:
    """Exact identities on ``n`` seeded random polynomials h(q, p)."""
    sysm, lmap = an.system, an.lmap
    hs = random_polynomials(list(sysm.coordinates) + list(sysm.momenta), n, seed)
    out = {}
    Ks = [apply_K(lmap, h) for h in hs]
    out["K three forms"] = all(is_zero(k - apply_K_el_form(lmap, h)) and is_zero(k - apply_K_h_form(lmap, h))
                               for h, k in zip(hs, Ks))
    fields = lmap.kernel_fields
    out["Gamma-K"] = all(is_zero(f.apply(k) - pull_back(sysm, poisson_bracket(sysm, h, phi)))
                         for h, k in zip(hs, Ks) for f, phi in zip(fields, lmap.phis))
    out["Gamlam"] = all(is_zero(f.apply(v) - (1 if a == b else 0))
                        for a, f in enumerate(fields) for b, v in enumerate(lmap.v))
    chis = primary_lagrangian_constraints(sysm, lmap.gammas)
    out["primlag"] = all(is_zero(c - apply_K(lmap, phi)) for c, phi in zip(chis, lmap.phis))
    pb = lambda f, g: poisson_bracket(sysm, f, g)
    trip = list(zip(hs, hs[1:] + hs[:1], hs[2:] + hs[:2]))
    out["Poisson antisymmetry"] = all(is_zero(pb(f, g) + pb(g, f)) for f, g, _ in trip)
    out["Jacobi"] = all(is_zero(pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))) for f, g, h in trip)
    table = sysm.table
    out["round trip"] = all(parse(to_string(e), table) == e for e in hs + Ks)
    out["idempotence"] = all(canonical(e) == e for e in hs + Ks)
    if lmap.phis:
        chain = an.hchain.exprs()
        combos = [sum((h * g for h, g in zip(hs[i:], chain)), Sym(sysm.coordinates[0]) * 0) for i in range(3)]
        ok = True
        for f in combos:
            red = reduce_mod(f, chain)
            total = red.normal_form
            for c, g in zip(red.combination, chain):
                total = total + c * g
            ok = ok and red.is_zero and is_zero(total - f)
        out["reduce_mod certificate"] = ok
    return out


def _check_report(res: FixtureResult, rep: NoetherReport, spec: dict, table) -> None:
    name = rep.candidate.name
    checks = {"noether": ("KG", rep.noether), "k_condition": ("KG", rep.k_condition.verdict),
              "phase_space": ("T1", rep.phase_space.verdict), "velocity_space": ("T5", rep.velocity_space.verdict),
              "commutation": ("T2", rep.commutation.verdict), "bar_delta": ("noether-identity", rep.bar_delta.verdict)}
    for key, (row, got) in checks.items():
        if key in spec:
            _verdict(res, row, f"{name}.{key}", spec[key], got)
    exprs = {"k_residual": ("KG", rep.k_condition.residual), "bar_delta_L": ("noether-identity", rep.bar_delta.bar_delta_L),
             "boundary": ("noether-identity", rep.bar_delta.boundary),
             "delta_L_L": ("noether-identity", rep.bar_delta.delta_L_L)}
    for key, (row, got) in exprs.items():
        if key in spec:
            _same(res, row, f"{name}.{key}", spec[key], got, table)
    for z, e in spec.get("difference", {}).items():
        _same(res, "T2", f"{name}.difference[{z}]", e, rep.commutation.coefficients[table[z]], table)
    for z, e in spec.get("V_H", {}).items():
        _same(res, "T1", f"{name}.V_H[{z}]", e, rep.candidate.V_H.component(table[z]), table)


def check_declaration(decl: SystemDeclaration, seed: int | None = None) -> FixtureResult:
    decl = _with_expected_inputs(decl)
    seed = decl.options["probe_seed"] if seed is None else seed
    res = FixtureResult(decl.name)
    an = run_analysis(decl, seed=seed)
    ex = decl.expected
    sysm, lmap, table = an.system, an.lmap, an.system.table
    for p, e in ex.get("momenta", {}).items():
        _same(res, "derivation", f"momenta[{p}]", e, sysm.momenta_hat[sysm.momenta.index(table[p])], table)
    if "hamiltonian" in ex:
        _same(res, "derivation", "hamiltonian", ex["hamiltonian"], lmap.hamiltonian, table)
    if "primary_constraints" in ex:
        _same_list(res, "derivation", "primary_constraints", ex["primary_constraints"], list(lmap.phis), table)
    if "kernel" in ex:
        got = [list(g) for g in lmap.gammas]
        res.mark("derivation", len(got) == len(ex["kernel"]))
        for i, (e, g) in enumerate(zip(ex["kernel"], got)):
            _same_list(res, "derivation", f"kernel[{i}]", e, g, table)
    if "v_multipliers" in ex:
        _same_list(res, "derivation", "v_multipliers", ex["v_multipliers"], list(lmap.v), table)
    for key, chain in (("hamiltonian_chain", an.hchain), ("lagrangian_chain", an.lchain)):
        if key in ex:
            got = [[c.expr for c in lvl] for lvl in chain.levels]
            want = [lvl for lvl in ex[key] if lvl] if key == "hamiltonian_chain" else ex[key]
            got = [lvl for lvl in got if lvl] if key == "hamiltonian_chain" else got
            if len(want) != len(got):
                res.mark("derivation", False)
                res.diffs.append((key, f"{len(want)} levels", f"{len(got)} levels"))
            for n, (e, g) in enumerate(zip(want, got)):
                _same_list(res, "derivation", f"{key}[{n}]", e, g, table)
    for q, e in ex.get("euler_lagrange", {}).items():
        _same(res, "derivation", f"euler_lagrange[{q}]", e, sysm.euler_lagrange[sysm.coordinates.index(table[q])], table)

    specs = ex.get("generators", {})
    for rep in an.reports:
        res.mark("T3", rep.commutation.theorem3_ok)
        res.mark("T2", rep.commutation.first_order)
        fam_zero = all(is_zero(r) for r in rep.commutation.family_residuals)
        rnd_zero = all(is_zero(r) for r in rep.commutation.random_residuals)
        res.mark("T2", fam_zero == rnd_zero)
        res.mark("T4", rep.equivalence_holds)
        res.mark("T5", rep.implication_holds)
        if rep.phase_space.verdict is Verdict.PASS and rep.phase_space.commutator is not None:
            res.mark("T1", rep.phase_space.commutator.holds)
        if rep.noether is Verdict.PASS:
            res.mark("noether-identity", is_zero(rep.bar_delta.noether_identity_residual))
        res.mark("noether-identity", all(is_zero(r) for r in rep.bar_delta.bar_relation_residuals))
        if rep.candidate.name in specs:
            _check_report(res, rep, specs[rep.candidate.name], table)
    for g in ex.get("gauge", []):
        run = next((r for r in an.gauge if r.seed_text == g["seed"]), None)
        if run is None:
            res.mark("gauge", False)
            res.diffs.append((f"gauge[{g['seed']}]", "a run", "none"))
            continue
        ok = run.solution.ok == g.get("ok", True)
        res.mark("gauge", ok)
        if not ok:
            res.diffs.append((f"gauge[{g['seed']}].ok", str(g.get("ok", True)), str(run.solution.ok)))
        if run.solution.ok and "weakly_equals" in g:
            target = parse(g["weakly_equals"], table)
            red = reduce_mod(run.solution.candidate.G_H - target, an.hchain.exprs())
            res.mark("gauge", red.is_zero)
            if not red.is_zero:
                res.diffs.append((f"gauge[{g['seed']}]", to_string(target), to_string(run.solution.candidate.G_H)))
        if run.report is not None:
            res.mark("gauge", run.report.noether is Verdict.PASS)
    suite = identity_suite(an, seed)
    for k, v in suite.items():
        res.mark("identities", v)
        if not v:
            res.diffs.append((f"identity {k}", "holds", "fails"))
    return res


def render_matrix(results: Iterable[FixtureResult]) -> str:
    results = list(results)
    width = max(len(ROW_TITLES[r]) for r in ROWS) + 2
    cols = [r.name for r in results]
    lines = [" " * width + "  ".join(f"{c:^{max(len(c), 4)}}" for c in cols)]
    for row in ROWS:
        cells = []
        for r, c in zip(results, cols):
            v = r.rows.get(row)
            mark = "-" if v is None else ("PASS" if v else "FAIL")
            cells.append(f"{mark:^{max(len(c), 4)}}")
        lines.append(f"{ROW_TITLES[row]:<{width}}" + "  ".join(cells))
    return "\n".join(lines)


def run_self_test(paths: list[str] | None = None, seed: int | None = None, out: TextIO = sys.stdout) -> int:
    paths = paths or bundled_fixtures()
    results = []
    status = 0
    for p in paths:
        try:
            results.append(check_declaration(load(p), seed))
        except Exception as exc:  # a broken fixture is a red cell, not a crash
            r = FixtureResult(str(p))
            r.rows["derivation"] = False
            r.diffs.append(("error", "", f"{type(exc).__name__}: {exc}"))
            results.append(r)
    out.write(render_matrix(results) + "\n")
    for r in results:
        for what, exp, got in r.diffs:
            out.write(f"\n[{r.name}] {what}\n  expected: {exp}\n  got:      {got}\n")
        if not r.ok:
            status = 1
    out.write("\nall green\n" if status == 0 else "\nFAILURES\n")
    return status


def check_source(source: str, seed: int | None = None) -> FixtureResult:
    return check_declaration(loads(source), seed)
