"""System declaration files (TOML)."""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .expr import Expr, ParseError, SymbolError, SymbolTable, parse

DEFAULT_OPTIONS = {
    "max_stabilization_depth": 10,
    "ansatz_degree": 4,
    "probe_seed": 20240611,
    "probe_points": 20,
    "gauge_depth": 1,
}

_TOP_KEYS = {"name", "coordinates", "parameters", "gauge_functions", "lagrangian", "hamiltonian",
             "primary_constraints", "generators", "gauge_seeds", "options", "expected"}


class DeclarationError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path or '<declaration>'}" + (f":{line}" if line else "")
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    expr: str


@dataclass
class SystemDeclaration:
    name: str
    coordinates: list[str]
    parameters: list[str]
    gauge_functions: list[str]
    lagrangian: str
    hamiltonian: str | None = None
    primary_constraints: list[str] | None = None
    generators: list[GeneratorSpec] = field(default_factory=list)
    gauge_seeds: list[str] = field(default_factory=list)
    options: dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))
    expected: dict = field(default_factory=dict)
    path: str | None = None
    source: str = ""

    def table(self) -> SymbolTable:
        try:
            return SymbolTable(self.coordinates, self.parameters, self.gauge_functions)
        except SymbolError as exc:
            raise DeclarationError(str(exc), _line_of(self.source, "coordinates"), self.path) from exc

    def parse_field(self, key: str, text: str, table: SymbolTable | None = None) -> Expr:
        table = table or self.table()
        try:
            return parse(text, table)
        except ParseError as exc:
            raise DeclarationError(f"field {key!r}: {exc}", _line_of(self.source, key, text),
                                   self.path) from exc


def _line_of(source: str, key: str, text: str | None = None) -> int | None:
    lines = source.splitlines()
    pat = re.compile(rf"^\s*\[*\s*{re.escape(key)}\b")
    if text is not None:
        # the key's own line, then a quoted occurrence, then any occurrence
        tests = (lambda ln: pat.match(ln) and text in ln, lambda ln: f'"{text}"' in ln,
                 lambda ln: text in ln)
        for test in tests:
            for i, line in enumerate(lines, 1):
                if test(line):
                    return i
        # not from this file (e.g. a command line argument)
        return None
    for i, line in enumerate(lines, 1):
        if pat.match(line):
            return i
    return None


def _expect(data: dict, key: str, kind, source: str, path: str | None, required: bool = False):
    if key not in data:
        if required:
            raise DeclarationError(f"missing required field {key!r}", None, path)
        return None
    value = data[key]
    if kind is list:
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise DeclarationError(f"field {key!r} must be a list of strings", _line_of(source, key), path)
    elif not isinstance(value, kind):
        raise DeclarationError(f"field {key!r} must be a {kind.__name__}", _line_of(source, key), path)
    return value


def loads(source: str, path: str | None = None) -> SystemDeclaration:
    try:
        data: dict[str, Any] = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise DeclarationError(f"TOML syntax error: {exc}", int(m.group(1)) if m else None, path) from exc
    unknown = set(data) - _TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise DeclarationError(f"unknown field {key!r}", _line_of(source, key), path)
    name = _expect(data, "name", str, source, path, required=True)
    coords = _expect(data, "coordinates", list, source, path, required=True)
    if not coords:
        raise DeclarationError("at least one coordinate is required", _line_of(source, "coordinates"), path)
    lag = _expect(data, "lagrangian", str, source, path, required=True)
    gens = []
    raw_gens = data.get("generators", [])
    if not isinstance(raw_gens, list):
        raise DeclarationError("'generators' must be an array of tables", _line_of(source, "generators"), path)
    for i, g in enumerate(raw_gens):
        if not isinstance(g, dict) or not isinstance(g.get("expr"), str):
            raise DeclarationError(f"generator #{i + 1} needs a string 'expr'", _line_of(source, "generators"), path)
        gens.append(GeneratorSpec(str(g.get("name", f"G{i + 1}")), g["expr"]))
    options = dict(DEFAULT_OPTIONS)
    raw_opts = data.get("options", {})
    if not isinstance(raw_opts, dict):
        raise DeclarationError("'options' must be a table", _line_of(source, "options"), path)
    for k, v in raw_opts.items():
        if k not in DEFAULT_OPTIONS:
            raise DeclarationError(f"unknown option {k!r}", _line_of(source, k), path)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise DeclarationError(f"option {k!r} must be a nonnegative integer", _line_of(source, k), path)
        options[k] = v
    expected = data.get("expected", {})
    if not isinstance(expected, dict):
        raise DeclarationError("'expected' must be a table", _line_of(source, "expected"), path)
    decl = SystemDeclaration(
        name=name,
        coordinates=coords,
        parameters=_expect(data, "parameters", list, source, path) or [],
        gauge_functions=_expect(data, "gauge_functions", list, source, path) or ["eps"],
        lagrangian=lag,
        hamiltonian=_expect(data, "hamiltonian", str, source, path),
        primary_constraints=_expect(data, "primary_constraints", list, source, path),
        generators=gens,
        gauge_seeds=_expect(data, "gauge_seeds", list, source, path) or [],
        options=options,
        expected=expected,
        path=path,
        source=source,
    )
    table = decl.table()
    decl.parse_field("lagrangian", lag, table)
    if decl.hamiltonian is not None:
        decl.parse_field("hamiltonian", decl.hamiltonian, table)
    for text in decl.primary_constraints or []:
        decl.parse_field("primary_constraints", text, table)
    for g in gens:
        decl.parse_field("generators", g.expr, table)
    for text in decl.gauge_seeds:
        decl.parse_field("gauge_seeds", text, table)
    return decl


def load(path: str | Path) -> SystemDeclaration:
    p = Path(path)
    try:
        source = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DeclarationError(f"cannot read declaration: {exc.strerror}", None, str(p)) from exc
    return loads(source, str(p))
