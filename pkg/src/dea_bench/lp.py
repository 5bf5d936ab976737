"""Small dense linear programs solved by a two-phase primal simplex.

The tableau loop is compiled with numba; envelopment programs are tiny
(a handful of rows, a few dozen columns) but the bootstrap solves hundreds
of thousands of them, so the per-call overhead matters more than
asymptotics. Bland's rule guarantees termination on degenerate vertices,
which are the norm in DEA.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numba
import numpy as np

from .errors import NumericalFailure

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
OPT_TOL = 1e-7
ZERO_TOL = 1e-11
ITERATION_FACTOR = 50

LE, EQ, GE = 0, 1, 2
_RELATION_CODES = {"<=": LE, "=": EQ, "==": EQ, ">=": GE}

_OPTIMAL, _INFEASIBLE, _UNBOUNDED, _CAP = 0, 1, 2, 3


class Sense(str, Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``sense c.x`` subject to ``A x (rel) rhs`` and ``x >= lower_bounds``.

    ``relations`` holds one of ``"<="``, ``"="``, ``">="`` per row. A lower
    bound of ``-inf`` makes the variable free.
    """

    sense: Sense
    objective: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        n = c.size
        A = np.asarray(self.A, dtype=float).reshape(-1, n) if n else np.zeros((0, 0))
        rhs = np.asarray(self.rhs, dtype=float).ravel()
        if A.shape[0] != rhs.size or len(self.relations) != rhs.size:
            raise ValueError("constraint rows, relations and rhs disagree in length")
        for rel in self.relations:
            if rel not in _RELATION_CODES:
                raise ValueError(f"unknown relation {rel!r}")
        lb = np.zeros(n) if self.lower_bounds is None else np.asarray(self.lower_bounds, float).ravel()
        if lb.size != n:
            raise ValueError("lower_bounds must have one entry per variable")
        if not (np.isfinite(c).all() and np.isfinite(A).all() and np.isfinite(rhs).all()):
            raise ValueError("LP data must be finite")
        if np.isnan(lb).any() or np.isposinf(lb).any():
            raise ValueError("lower bounds must be finite or -inf")
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "lower_bounds", lb)

    @classmethod
    def from_constraints(
        cls,
        sense: Sense | str,
        objective: Sequence[float],
        constraints: Sequence[tuple[Sequence[float], str, float]],
        lower_bounds: Sequence[float] | None = None,
    ) -> "LinearProgram":
        n = len(objective)
        rows = [np.asarray(coefs, dtype=float) for coefs, _, _ in constraints]
        for r in rows:
            if r.size != n:
                raise ValueError("constraint length differs from objective length")
        A = np.vstack(rows) if rows else np.zeros((0, n))
        return cls(
            Sense(sense),
            np.asarray(objective, dtype=float),
            A,
            tuple(rel for _, rel, _ in constraints),
            np.array([rhs for _, _, rhs in constraints], dtype=float),
            None if lower_bounds is None else np.asarray(lower_bounds, dtype=float),
        )

    @property
    def n_vars(self) -> int:
        return self.objective.size


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    objective_value: float | None = None
    primal: np.ndarray | None = None
    iterations: int = 0


@numba.njit(cache=True)
def _pivot(T, r, basis, row, col):
    piv = T[row, col]
    T[row, :] /= piv
    for i in range(T.shape[0]):
        if i != row:
            f = T[i, col]
            if f != 0.0:
                T[i, :] -= f * T[row, :]
    f = r[col]
    if f != 0.0:
        r[:] -= f * T[row, :]
    basis[row] = col


@numba.njit(cache=True)
def _bland_loop(T, r, basis, active, n_enter, it, max_iter, pivot_tol, opt_tol):
    """Run simplex pivots with Bland's rule. Returns (status, iterations)."""
    k = T.shape[0]
    last = T.shape[1] - 1
    while True:
        col = -1
        for j in range(n_enter):
            if r[j] < -opt_tol:
                col = j
                break
        if col < 0:
            return _OPTIMAL, it
        if it >= max_iter:
            return _CAP, it
        row = -1
        best = np.inf
        for i in range(k):
            if not active[i]:
                continue
            a = T[i, col]
            if a > pivot_tol:
                ratio = T[i, last] / a
                if row < 0 or ratio < best - 1e-12 * (1.0 + abs(best)):
                    row = i
                    best = ratio
                elif ratio <= best + 1e-12 * (1.0 + abs(best)) and basis[i] < basis[row]:
                    row = i
                    best = min(best, ratio)
        if row < 0:
            return _UNBOUNDED, it
        _pivot(T, r, basis, row, col)
        # roundoff on degenerate vertices breaks the exact ties Bland's rule
        # relies on for termination
        for i in range(k):
            if abs(T[i, last]) < ZERO_TOL:
                T[i, last] = 0.0
        it += 1


@numba.njit(cache=True)
def _simplex(A, b, rel, c, pivot_tol, feas_tol, opt_tol, max_iter):
    """Minimize c.x s.t. A x (rel) b, x >= 0.

    Returns (status, x, objective, iterations).
    """
    k, n = A.shape
    A = A.copy()
    b = b.copy()
    rel = rel.copy()
    for i in range(k):
        if b[i] < 0.0:
            A[i, :] = -A[i, :]
            b[i] = -b[i]
            if rel[i] == 0:
                rel[i] = 2
            elif rel[i] == 2:
                rel[i] = 0

    n_slack = 0
    n_art = 0
    for i in range(k):
        if rel[i] != 1:
            n_slack += 1
        if rel[i] != 0:
            n_art += 1
    art_start = n + n_slack
    N = art_start + n_art
    T = np.zeros((k, N + 1))
    basis = np.empty(k, dtype=np.int64)
    T[:, :n] = A
    T[:, N] = b
    s = n
    a = art_start
    for i in range(k):
        if rel[i] == 0:
            T[i, s] = 1.0
            basis[i] = s
            s += 1
        elif rel[i] == 2:
            T[i, s] = -1.0
            s += 1
            T[i, a] = 1.0
            basis[i] = a
            a += 1
        else:
            T[i, a] = 1.0
            basis[i] = a
            a += 1

    active = np.ones(k, dtype=np.bool_)
    it = 0
    x = np.zeros(n)
    bscale = 1.0
    for i in range(k):
        if b[i] > bscale:
            bscale = b[i]

    if n_art > 0:
        r = np.zeros(N + 1)
        r[art_start:N] = 1.0
        for i in range(k):
            if basis[i] >= art_start:
                r[:] -= T[i, :]
        status, it = _bland_loop(T, r, basis, active, N, it, max_iter, pivot_tol, opt_tol)
        if status == _CAP:
            return _CAP, x, np.nan, it
        if -r[N] > feas_tol * bscale:
            return _INFEASIBLE, x, np.nan, it
        # drive remaining zero-level artificials out of the basis
        for i in range(k):
            if basis[i] >= art_start:
                col = -1
                best = pivot_tol
                for j in range(art_start):
                    if abs(T[i, j]) > best:
                        best = abs(T[i, j])
                        col = j
                if col >= 0:
                    _pivot(T, r, basis, i, col)
                else:
                    active[i] = False

    r = np.zeros(N + 1)
    r[:n] = c
    for i in range(k):
        if active[i]:
            cb = c[basis[i]] if basis[i] < n else 0.0
            if cb != 0.0:
                r[:] -= cb * T[i, :]
    # inactive (redundant) rows still hold artificial columns; zero them so
    # later pivots ignore them
    for i in range(k):
        if not active[i]:
            T[i, :] = 0.0
    status, it = _bland_loop(T, r, basis, active, art_start, it, max_iter, pivot_tol, opt_tol)
    if status != _OPTIMAL:
        return status, x, np.nan, it
    for i in range(k):
        if active[i] and basis[i] < n:
            x[basis[i]] = T[i, N]
    obj = 0.0
    for j in range(n):
        obj += c[j] * x[j]
    return _OPTIMAL, x, obj, it


def solve_standard(A, b, rel_codes, c):
    """Minimize ``c.x`` over ``x >= 0`` with ``A x (rel) b``; array-level entry.

    ``rel_codes`` uses :data:`LE`, :data:`EQ`, :data:`GE`. Returns
    ``(status, x, objective)`` with status one of :class:`LpStatus`. Raises
    :class:`NumericalFailure` when the iteration cap is hit.
    """
    k, n = A.shape
    max_iter = ITERATION_FACTOR * (n + k)
    code, x, obj, _ = _simplex(
        np.ascontiguousarray(A, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(rel_codes, dtype=np.int64),
        np.ascontiguousarray(c, dtype=np.float64),
        PIVOT_TOL,
        FEAS_TOL,
        OPT_TOL,
        max_iter,
    )
    if code == _CAP:
        raise NumericalFailure(f"simplex exceeded {max_iter} iterations")
    if code == _INFEASIBLE:
        return LpStatus.INFEASIBLE, None, None
    if code == _UNBOUNDED:
        return LpStatus.UNBOUNDED, None, None
    return LpStatus.OPTIMAL, x, obj


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly to a vertex, or report it infeasible/unbounded."""
    n = lp.n_vars
    lb = lp.lower_bounds
    free = np.isneginf(lb)
    shift = np.where(free, 0.0, lb)
    # free variables become x = x_plus - x_minus; the minus parts are appended
    A = lp.A
    c = lp.objective if lp.sense is Sense.MINIMIZE else -lp.objective
    if free.any():
        A = np.hstack([A, -A[:, free]])
        c = np.concatenate([c, -c[free]])
    b = lp.rhs - lp.A @ shift
    rel = np.array([_RELATION_CODES[r] for r in lp.relations], dtype=np.int64)
    if A.shape[0] == 0:
        # no constraints: optimum at the bounds unless some cost direction is open
        if (c < 0).any():
            return LpSolution(LpStatus.UNBOUNDED)
        x = shift.copy()
        return LpSolution(LpStatus.OPTIMAL, float(lp.objective @ x), x)
    max_iter = ITERATION_FACTOR * (A.shape[1] + A.shape[0])
    code, z, _, iters = _simplex(
        np.ascontiguousarray(A), np.ascontiguousarray(b), rel, np.ascontiguousarray(c, dtype=float),
        PIVOT_TOL, FEAS_TOL, OPT_TOL, max_iter,
    )
    if code == _CAP:
        raise NumericalFailure(f"simplex exceeded {max_iter} iterations")
    if code == _INFEASIBLE:
        return LpSolution(LpStatus.INFEASIBLE, iterations=iters)
    if code == _UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, iterations=iters)
    x = z[:n].copy()
    if free.any():
        x[free] -= z[n:]
    x += shift
    return LpSolution(LpStatus.OPTIMAL, float(lp.objective @ x), x, iters)
