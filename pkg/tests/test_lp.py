import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from dea_bench import lp
from dea_bench.lp import EQ, GE, LE, LinearProgram, LpStatus, Sense, solve, solve_standard


def _scipy(A, b, rel, c):
    ub_rows = [i for i in range(len(b)) if rel[i] != EQ]
    eq_rows = [i for i in range(len(b)) if rel[i] == EQ]
    sign = np.array([1.0 if rel[i] == LE else -1.0 for i in ub_rows])
    A_ub = A[ub_rows] * sign[:, None] if ub_rows else None
    b_ub = b[ub_rows] * sign if ub_rows else None
    A_eq = A[eq_rows] if eq_rows else None
    b_eq = b[eq_rows] if eq_rows else None
    return linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, method="highs")


def test_single_bound():
    sol = solve(LinearProgram.from_constraints("min", [1.0], [([1.0], ">=", 3.0)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(3.0, abs=1e-12)


def test_maximize_textbook():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    prog = LinearProgram.from_constraints(
        Sense.MAXIMIZE,
        [3.0, 5.0],
        [([1, 0], "<=", 4), ([0, 2], "<=", 12), ([3, 2], "<=", 18)],
    )
    sol = solve(prog)
    assert sol.objective_value == pytest.approx(36.0)
    np.testing.assert_allclose(sol.primal, [2.0, 6.0], atol=1e-9)


def test_infeasible():
    prog = LinearProgram.from_constraints("min", [1.0], [([1.0], "<=", 1.0), ([1.0], ">=", 2.0)])
    assert solve(prog).status is LpStatus.INFEASIBLE


def test_unbounded():
    prog = LinearProgram.from_constraints("max", [1.0, 0.0], [([1.0, -1.0], "<=", 1.0)])
    assert solve(prog).status is LpStatus.UNBOUNDED


def test_free_variable():
    # min x with x free and x >= -5 as a constraint
    prog = LinearProgram.from_constraints("min", [1.0], [([1.0], ">=", -5.0)], lower_bounds=[-np.inf])
    sol = solve(prog)
    assert sol.objective_value == pytest.approx(-5.0)
    assert sol.primal[0] == pytest.approx(-5.0)


def test_shifted_lower_bound():
    prog = LinearProgram.from_constraints("min", [2.0], [([1.0], "<=", 10.0)], lower_bounds=[1.5])
    assert solve(prog).objective_value == pytest.approx(3.0)


def test_redundant_equalities():
    # the second equality repeats the first
    A = np.array([[1.0, 1.0], [2.0, 2.0]])
    code, x, obj = solve_standard(A, np.array([1.0, 2.0]), np.array([EQ, EQ]), np.array([1.0, 2.0]))
    assert code is LpStatus.OPTIMAL
    assert obj == pytest.approx(1.0)
    np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-12)


def test_negative_rhs_is_flipped():
    # -x <= -2 means x >= 2
    code, x, obj = solve_standard(np.array([[-1.0]]), np.array([-2.0]), np.array([LE]), np.array([1.0]))
    assert obj == pytest.approx(2.0)


def test_validation():
    with pytest.raises(ValueError):
        LinearProgram.from_constraints("min", [1.0, 2.0], [([1.0], "<=", 1.0)])
    with pytest.raises(ValueError):
        LinearProgram.from_constraints("min", [1.0], [([1.0], "<", 1.0)])
    with pytest.raises(ValueError):
        LinearProgram.from_constraints("min", [np.nan], [([1.0], "<=", 1.0)])


def test_degenerate_dea_program_terminates():
    # bootstrap-style pseudo data used to cycle on roundoff-level ties
    rng = np.random.default_rng(5)
    from dea_bench.engine import radial_program

    X = rng.uniform(0.1, 1.0, (30, 3))
    Y = rng.uniform(0.1, 1.0, (30, 2))
    X[:10] = X[0]
    Y[:10] = Y[0]
    for j in range(30):
        code, _, obj = solve_standard(*radial_program(X, Y, X[j], Y[j], True))
        assert code is LpStatus.OPTIMAL
        assert 0 < obj <= 1 + 1e-9


def _random_problem(rng):
    k = int(rng.integers(1, 6))
    n = int(rng.integers(1, 6))
    A = np.round(rng.normal(size=(k, n)) * 3)
    b = np.round(rng.normal(size=k) * 5)
    rel = rng.integers(0, 3, size=k)
    c = np.round(rng.normal(size=n) * 3)
    # keep most problems bounded
    A = np.vstack([A, np.ones(n)])
    b = np.append(b, 20.0)
    rel = np.append(rel, LE)
    return A, b, rel, c


@pytest.mark.parametrize("seed", range(300))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    A, b, rel, c = _random_problem(rng)
    code, x, obj = solve_standard(A, b, rel, c)
    ref = _scipy(A, b, rel, c)
    if ref.status == 2:
        assert code is LpStatus.INFEASIBLE
        return
    assert ref.status == 0
    assert code is LpStatus.OPTIMAL
    assert obj == pytest.approx(ref.fun, abs=1e-7)
    # returned point is feasible
    lhs = A @ x
    assert (x >= -1e-9).all()
    for i in range(len(b)):
        if rel[i] == LE:
            assert lhs[i] <= b[i] + 1e-7
        elif rel[i] == GE:
            assert lhs[i] >= b[i] - 1e-7
        else:
            assert lhs[i] == pytest.approx(b[i], abs=1e-7)


@pytest.mark.parametrize("seed", range(60))
def test_matches_vertex_enumeration(seed):
    """Two-variable inequality programs against brute-force vertices."""
    rng = np.random.default_rng(1000 + seed)
    k = int(rng.integers(1, 5))
    A = rng.uniform(-1, 3, (k, 2))
    b = rng.uniform(1, 10, k)
    c = rng.uniform(-2, 2, 2)
    # box keeps it bounded; x >= 0 rows are part of the vertex set
    rows = np.vstack([A, [1, 0], [0, 1], [-1, 0], [0, -1]])
    rhs = np.concatenate([b, [10, 10, 0, 0]])
    best = np.inf
    for i, j in itertools.combinations(range(len(rhs)), 2):
        M = rows[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, rhs[[i, j]])
        if (rows @ v <= rhs + 1e-9).all():
            best = min(best, float(c @ v))
    A_all = np.vstack([A, [1, 0], [0, 1]])
    b_all = np.concatenate([b, [10, 10]])
    code, _, obj = solve_standard(A_all, b_all, np.zeros(len(b_all), dtype=int), c)
    assert code is LpStatus.OPTIMAL
    assert obj == pytest.approx(best, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0.5, 50.0), min_size=2, max_size=5),
    st.lists(st.floats(0.5, 50.0), min_size=2, max_size=5),
)
def test_single_ratio_dual(xs, ys):
    # max y0*u s.t. y_j u <= x_j v ... reduced to the closed form min_j x_j/y_j
    n = min(len(xs), len(ys))
    xs, ys = np.array(xs[:n]), np.array(ys[:n])
    A = ys[:, None]
    code, _, obj = solve_standard(A, xs, np.zeros(n, dtype=int), np.array([-1.0]))
    assert code is LpStatus.OPTIMAL
    assert -obj == pytest.approx(np.min(xs / ys), rel=1e-9)


def test_deterministic():
    rng = np.random.default_rng(3)
    A, b, rel, c = _random_problem(rng)
    r1 = solve_standard(A, b, rel, c)
    r2 = solve_standard(A, b, rel, c)
    assert r1[0] is r2[0]
    if r1[1] is not None:
        assert np.array_equal(r1[1], r2[1])


def test_iteration_cap(monkeypatch):
    monkeypatch.setattr(lp, "ITERATION_FACTOR", 0)
    from dea_bench.errors import NumericalFailure

    with pytest.raises(NumericalFailure):
        solve_standard(np.array([[1.0, 1.0]]), np.array([1.0]), np.array([GE]), np.array([1.0, 1.0]))
