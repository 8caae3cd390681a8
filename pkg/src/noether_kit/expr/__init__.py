"""Symbolic expressions: trees, canonical forms, parsing and calculus."""

from .calculus import (
    SubstitutionCycle,
    diff,
    expr_terms,
    linear_coefficients,
    polynomial_coefficients,
    split_terms,
    substitute,
    substitute_sequential,
)
from .nodes import ONE, ZERO, Add, Expr, ExprError, Func, Mul, Num, Pow, Sym, as_expr
from .normal import apply_function, canonical, denominator, numerator
from .parser import ParseError, parse
from .printer import to_string
from .probe import (
    ProbeDisagreement,
    ProbeDomainError,
    configure as configure_probe,
    evaluate,
    is_zero,
    numeric_is_zero,
    sample_points,
)
from .symbols import (
    TIME,
    Symbol,
    SymbolError,
    SymbolKind,
    SymbolTable,
    free_derivative,
    free_parameter,
    gauge_symbol,
)


def exp(e: Expr) -> Expr:
    return apply_function("exp", as_expr(e))


def log(e: Expr) -> Expr:
    return apply_function("log", as_expr(e))


def sin(e: Expr) -> Expr:
    return apply_function("sin", as_expr(e))


def cos(e: Expr) -> Expr:
    return apply_function("cos", as_expr(e))


def sqrt(e: Expr) -> Expr:
    return apply_function("sqrt", as_expr(e))


__all__ = [name for name in dir() if not name.startswith("_")]
