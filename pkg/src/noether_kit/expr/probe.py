"""Numeric evaluation and the randomized zero probe.

The probe cross-checks the symbolic zero test: a canonical form that is not
the literal zero but vanishes at every sampled point (or the converse) means
the rewrite table missed an identity, which is reported as an internal error.
"""

from __future__ import annotations

import math
import os
import random
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from .nodes import Add, Expr, ExprError, Func, Mul, Num, Pow, Sym
from .normal import sorted_terms, term_expr, to_rf
from .symbols import Symbol

LOW, HIGH = 0.3, 1.7
REL_TOL = 1e-9


class ProbeDomainError(ExprError):
    pass


class ProbeWarning(UserWarning):
    pass


class ProbeDisagreement(AssertionError):
    """Symbolic and numeric zero tests disagree: the rewrite table is incomplete."""


@dataclass
class ProbeConfig:
    enabled: bool = os.environ.get("NOETHER_KIT_PROBE", "") not in ("", "0")
    seed: int = 20240611
    points: int = 20
    retries: int = 3


CONFIG = ProbeConfig()


def configure(enabled: bool | None = None, seed: int | None = None, points: int | None = None) -> None:
    if enabled is not None:
        CONFIG.enabled = enabled
    if seed is not None:
        CONFIG.seed = seed
    if points is not None:
        CONFIG.points = points


def evaluate(e: Expr, env: Mapping[Symbol, float]) -> float:
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Sym):
        return env[e.symbol]
    if isinstance(e, Add):
        return math.fsum(evaluate(t, env) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= evaluate(f, env)
        return out
    if isinstance(e, Pow):
        b = evaluate(e.base, env)
        if e.exponent.denominator != 1 and b < 0:
            raise ProbeDomainError("fractional power of a negative value")
        if b == 0 and e.exponent < 0:
            raise ProbeDomainError("division by zero")
        return b ** float(e.exponent) if e.exponent.denominator != 1 else b ** int(e.exponent)
    if isinstance(e, Func):
        a = evaluate(e.arg, env)
        try:
            return getattr(math, e.name)(a)
        except (ValueError, OverflowError) as exc:
            raise ProbeDomainError(f"{e.name}({a}) outside its domain") from exc
    raise ExprError(type(e).__name__)  # pragma: no cover


def sample_points(symbols: Iterable[Symbol], n: int, seed: int) -> list[dict]:
    syms = sorted(symbols)
    rng = random.Random(seed)
    return [{s: rng.uniform(LOW, HIGH) for s in syms} for _ in range(n)]


def _numeric_zero_at(terms, env) -> bool:
    vals = [evaluate(t, env) for t in terms]
    scale = math.fsum(abs(v) for v in vals)
    total = math.fsum(vals)
    return abs(total) <= REL_TOL * max(scale, 1e-300)


def numeric_is_zero(e: Expr, points: int | None = None, seed: int | None = None) -> bool:
    """Numeric zero test of the numerator of ``e`` at random points."""
    points = CONFIG.points if points is None else points
    seed = CONFIG.seed if seed is None else seed
    r = to_rf(e)
    terms = [term_expr(c, m) for m, c in sorted_terms(r.num)]
    if not terms:
        return True
    for attempt in range(CONFIG.retries):
        try:
            envs = sample_points(e.free_symbols, points, seed + 7919 * attempt)
            return all(_numeric_zero_at(terms, env) for env in envs)
        except (ProbeDomainError, ZeroDivisionError, OverflowError):
            continue
    raise ProbeDomainError(f"numeric probe could not evaluate {e}")


def is_zero(e: Expr, probe: bool | None = None) -> bool:
    """Exact zero test on the canonical form, optionally cross-checked numerically."""
    symbolic = not to_rf(e).num
    if probe if probe is not None else CONFIG.enabled:
        try:
            numeric = numeric_is_zero(e)
        except ProbeDomainError as exc:
            warnings.warn(str(exc), ProbeWarning, stacklevel=2)
            return symbolic
        if numeric != symbolic:
            raise ProbeDisagreement(
                f"symbolic zero test says {symbolic} but numeric probe says {numeric} for {e}")
    return symbolic
