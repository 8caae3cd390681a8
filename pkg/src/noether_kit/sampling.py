"""Seeded random test functions for identity checks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .expr import Expr, Num, Sym, Symbol

DEFAULT_SEED = 20240611


def random_polynomial(symbols: Sequence[Symbol], rng: random.Random, max_degree: int = 2,
                      n_terms: int = 4) -> Expr:
    """Sum of ``n_terms`` monomials with small nonzero rational coefficients."""
    out = Num(0)
    for _ in range(n_terms):
        c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))
        term = Num(c)
        for _ in range(rng.randint(1, max_degree)):
            term = term * Sym(rng.choice(list(symbols)))
        out = out + term
    return out


def random_polynomials(symbols: Sequence[Symbol], count: int, seed: int = DEFAULT_SEED,
                       max_degree: int = 2, n_terms: int = 4) -> list[Expr]:
    rng = random.Random(seed)
    return [random_polynomial(symbols, rng, max_degree, n_terms) for _ in range(count)]
