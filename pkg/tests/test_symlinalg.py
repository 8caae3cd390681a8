"""Exact elimination checked against a floating point rank oracle (numpy)."""

from __future__ import annotations

import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noether_kit.expr import SymbolTable, evaluate, is_zero, parse
from noether_kit.symlinalg import InconsistentSystem, RankWarning, SymMatrix, null_space, rank, solve_linear

T = SymbolTable(["x", "w"], ["m"])


def numeric(M: SymMatrix, env=None) -> np.ndarray:
    return np.array([[evaluate(e, env or {}) for e in row] for row in M.rows], dtype=float)


def low_rank_ints(rng: random.Random, n: int, m: int, r: int) -> list[list[int]]:
    A = [[rng.randint(-3, 3) for _ in range(r)] for _ in range(n)]
    B = [[rng.randint(-3, 3) for _ in range(m)] for _ in range(r)]
    return [[sum(A[i][k] * B[k][j] for k in range(r)) for j in range(m)] for i in range(n)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 4), st.integers(0, 10_000))
def test_rank_and_null_space_match_numpy(n, m, r, seed):
    rows = low_rank_ints(random.Random(seed), n, m, min(r, n, m))
    M = SymMatrix(rows, ncols=m)
    ns = null_space(M)
    expected = int(np.linalg.matrix_rank(np.array(rows, dtype=float)))
    assert ns.rank == expected == rank(M)
    assert len(ns.vectors) == m - expected
    for v in ns.vectors:
        assert all(is_zero(e) for e in M.apply(v))
    if ns.vectors:
        # the basis is independent
        V = np.array([[evaluate(e, {}) for e in v] for v in ns.vectors])
        assert np.linalg.matrix_rank(V) == len(ns.vectors)


def test_exponential_entries_pivot_without_warning():
    # the relativistic particle Hessian: monomial pivots only
    M = SymMatrix([[parse("exp(-w)", T), 0], [0, 0]])
    with warnings.catch_warnings():
        warnings.simplefilter("error", RankWarning)
        ns = null_space(M)
    assert ns.rank == 1
    assert [str(e) for e in ns.vectors[0]] == ["0", "1"]


def test_non_monomial_pivot_warns_and_records_witness():
    M = SymMatrix([[parse("x + 1", T), parse("x", T)], [parse("x", T), parse("x - 1", T)]])
    with pytest.warns(RankWarning):
        ns = null_space(M)
    # det = -1, so the generic rank is 2
    assert ns.rank == 2 and not ns.vectors
    assert ns.assumed_rank_witness


def test_symbolic_null_space_matches_numeric_rank():
    warnings.simplefilter("ignore", RankWarning)
    M = SymMatrix([[parse("x", T), parse("x*w", T), 1],
                   [parse("2*x", T), parse("2*x*w", T), 2]])
    ns = null_space(M)
    env = {T["x"]: 0.7, T["w"]: 1.3}
    assert ns.rank == np.linalg.matrix_rank(numeric(M, env))
    for v in ns.vectors:
        assert all(is_zero(e) for e in M.apply(v))


def test_solve_linear_particular_and_homogeneous():
    M = SymMatrix([[1, 1, 0], [0, parse("exp(w)", T), 1]])
    b = [parse("x", T), parse("m", T)]
    sol = solve_linear(M, b)
    assert all(is_zero(a - c) for a, c in zip(M.apply(sol.particular), b))
    assert len(sol.homogeneous.vectors) == 1
    assert all(is_zero(e) for e in M.apply(sol.homogeneous.vectors[0]))


def test_inconsistent_system_raises_or_reports():
    M = SymMatrix([[1, 0], [2, 0]])
    b = [parse("x", T), parse("m", T)]
    with pytest.raises(InconsistentSystem) as info:
        solve_linear(M, b)
    assert info.value.residuals
    sol = solve_linear(M, b, compatibility=True)
    (cond,) = sol.conditions
    # the condition vanishes exactly on m = 2x
    x, m = T["x"], T["m"]
    for xv in (0.4, 0.9, 1.3):
        assert abs(evaluate(cond, {x: xv, m: 2 * xv})) < 1e-12
        assert abs(evaluate(cond, {x: xv, m: 2 * xv + 0.5})) > 1e-6


def test_random_regular_matrix_has_trivial_kernel():
    rng = random.Random(3)
    for _ in range(10):
        rows = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
        if abs(np.linalg.det(np.array(rows, dtype=float))) < 0.5:
            continue
        assert not null_space(SymMatrix(rows)).vectors
