from __future__ import annotations

import pytest

from noether_kit.declaration import DEFAULT_OPTIONS, DeclarationError, loads
from noether_kit.sampling import random_polynomials

GOOD = '''
name = "osc"
coordinates = ["q"]
parameters = ["k"]
lagrangian = "qdot^2/2 - k*q^2/2"
gauge_seeds = []

[[generators]]
name = "energy"
expr = "p_q^2/2 + k*q^2/2"

[options]
ansatz_degree = 3
'''


def test_good_declaration():
    d = loads(GOOD, "osc.toml")
    assert d.coordinates == ["q"] and d.parameters == ["k"]
    assert d.gauge_functions == ["eps"]
    assert d.generators[0].name == "energy"
    assert d.options["ansatz_degree"] == 3
    assert d.options["probe_seed"] == DEFAULT_OPTIONS["probe_seed"]


@pytest.mark.parametrize("source, fragment, line", [
    ('coordinates = ["q"]\nlagrangian = "qdot^2"', "missing required field 'name'", None),
    ('name = "a"\ncoordinates = []\nlagrangian = "1"', "at least one coordinate", 2),
    ('name = "a"\ncoordinates = ["q"]\nlagrangian = "qdot^2 +"', "field 'lagrangian'", 3),
    ('name = "a"\ncoordinates = ["q"]\nlagrangian = "r"', "undeclared identifier 'r'", 3),
    ('name = "a"\ncoordinates = ["q"]\nlagrangian = "qdot"\n[options]\nspeed = 1', "unknown option", 5),
    ('name = "a"\ncoordinates = ["q"]\nlagrangian = "qdot"\n[options]\nansatz_degree = -1', "nonnegative", 5),
    ('name = "a"\ncoordinates = ["q", "q"]\nlagrangian = "qdot"', "duplicate coordinate", 2),
    ('name = "a\ncoordinates', "TOML syntax error", 1),
])
def test_declaration_errors(source, fragment, line):
    with pytest.raises(DeclarationError) as info:
        loads(source, "d.toml")
    assert fragment in str(info.value)
    assert info.value.line == line


def test_random_polynomials_are_seeded():
    d = loads(GOOD)
    t = d.table()
    syms = [t["q"], t["p_q"]]
    a = [str(e) for e in random_polynomials(syms, 10, 1)]
    b = [str(e) for e in random_polynomials(syms, 10, 1)]
    c = [str(e) for e in random_polynomials(syms, 10, 2)]
    assert a == b and a != c
