from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import pytest

from noether_kit.declaration import load, loads
from noether_kit.expr import configure_probe, parse
from noether_kit.pipeline import run_analysis

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


@pytest.fixture(autouse=True, scope="session")
def _probe():
    # every is_zero call is cross-checked numerically during the tests
    configure_probe(enabled=True, seed=20240611, points=20)
    yield


@lru_cache(maxsize=None)
def analysis(name: str, generators: tuple = (), seeds: tuple = ()):
    return run_analysis(load(SYSTEMS / f"{name}.toml"), generators, seeds)


def analysis_of(source: str, generators=(), seeds=()):
    return run_analysis(loads(source), generators, seeds)


def P(an, text: str):
    """Parse ``text`` against the symbol table of an analysis."""
    return parse(text, an.system.table)


def legendre_of(coords, lagrangian: str, params=(), hamiltonian=None, phis=None):
    from noether_kit.expr import SymbolTable
    from noether_kit.legendre import build_legendre
    from noether_kit.system import build_system
    table = SymbolTable(list(coords), list(params), ["eps"])
    sysm = build_system("test", table, parse(lagrangian, table))
    H = parse(hamiltonian, table) if hamiltonian else None
    ph = [parse(p, table) for p in phis] if phis is not None else None
    return build_legendre(sysm, H, ph)
