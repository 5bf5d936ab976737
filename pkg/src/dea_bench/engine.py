"""Input-oriented DEA on a factor matrix.

Every program is built on column-normalized data (each factor divided by
its largest value) so tolerances mean the same thing whatever the units of
the raw factors; scores are scale-free and slacks are mapped back to the
original units.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .data_model import DeaResult, FactorMatrix, Method, RTS, Status
from .errors import (
    DeaBenchError,
    MismatchedInputs,
    NumericalFailure,
    SolverFailure,
    ZeroOutputUnsupported,
)
from .lp import EQ, GE, LE, LpStatus, solve_standard

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeaConfig:
    rts: RTS = RTS.CRS
    method: Method = Method.RADIAL
    unity_tolerance: float = 1e-6
    two_stage_slacks: bool = True
    # drop zero-valued outputs from the SBM output average instead of failing
    sbm_zero_outputs: bool = True

    def __post_init__(self):
        object.__setattr__(self, "rts", RTS(self.rts))
        object.__setattr__(self, "method", Method(self.method))
        if not 0 < self.unity_tolerance < 1e-3:
            raise ValueError("unity_tolerance must lie in (0, 1e-3)")


def _normalized(fm: FactorMatrix):
    xs = fm.inputs.max(axis=0)
    ys = fm.outputs.max(axis=0)
    xs[xs == 0] = 1.0
    ys[ys == 0] = 1.0
    return fm.inputs / xs, fm.outputs / ys, xs, ys


def _snap(score: float, tol: float) -> float:
    return 1.0 if abs(score - 1.0) < tol else score


def _solve(A, b, rel, c):
    try:
        return solve_standard(A, b, rel, c)
    except NumericalFailure as exc:
        raise SolverFailure(str(exc)) from exc


def radial_program(X, Y, x0, y0, vrs):
    """Envelopment program ``min theta`` over variables ``[theta, lambda]``.

    ``X``/``Y`` hold the reference set row-wise; returns ``(A, b, rel, c)``.
    """
    n, m = X.shape
    s = Y.shape[1]
    k = m + s + (1 if vrs else 0)
    A = np.zeros((k, n + 1))
    A[:m, 0] = -x0
    A[:m, 1:] = X.T
    A[m : m + s, 1:] = Y.T
    b = np.zeros(k)
    b[m : m + s] = y0
    rel = np.empty(k, dtype=np.int64)
    rel[:m] = LE
    rel[m : m + s] = GE
    if vrs:
        A[-1, 1:] = 1.0
        b[-1] = 1.0
        rel[-1] = EQ
    c = np.zeros(n + 1)
    c[0] = 1.0
    return A, b, rel, c


def _max_slack_program(X, Y, x0, y0, theta, vrs):
    n, m = X.shape
    s = Y.shape[1]
    k = m + s + (1 if vrs else 0)
    A = np.zeros((k, n + m + s))
    A[:m, :n] = X.T
    A[:m, n : n + m] = np.eye(m)
    A[m : m + s, :n] = Y.T
    A[m : m + s, n + m :] = -np.eye(s)
    b = np.concatenate([theta * x0, y0, [1.0] if vrs else []])
    rel = np.full(k, EQ, dtype=np.int64)
    if vrs:
        A[-1, :n] = 1.0
    c = np.zeros(n + m + s)
    c[n:] = -1.0
    return A, b, rel, c


def _envelopment(fm: FactorMatrix, dmu_index: int, cfg: DeaConfig, exclude_self: bool, method: Method):
    X, Y, xs, ys = _normalized(fm)
    ref = np.arange(fm.n_dmu)
    if exclude_self:
        ref = ref[ref != dmu_index]
    x0, y0 = X[dmu_index], Y[dmu_index]
    Xr, Yr = X[ref], Y[ref]
    vrs = cfg.rts is RTS.VRS
    dmu = fm.dmu_order[dmu_index]
    status, z, theta = _solve(*radial_program(Xr, Yr, x0, y0, vrs))
    if status is not LpStatus.OPTIMAL:
        # only reachable with the evaluated unit removed from the reference set
        return DeaResult(
            dmu, float("nan"), {}, (), (), Status.INFEASIBLE, method, cfg.rts,
            message="no feasible reference combination",
        )
    lam = z[1:]
    s_in = x0 * theta - Xr.T @ lam
    s_out = Yr.T @ lam - y0
    if cfg.two_stage_slacks:
        status2, z2, _ = _solve(*_max_slack_program(Xr, Yr, x0, y0, theta, vrs))
        if status2 is LpStatus.OPTIMAL:
            n = len(ref)
            m = X.shape[1]
            lam, s_in, s_out = z2[:n], z2[n : n + m], z2[n + m :]
        else:
            log.debug("slack stage failed for %s; keeping first-stage residuals", dmu)
    s_in = np.clip(s_in, 0.0, None) * xs
    s_out = np.clip(s_out, 0.0, None) * ys
    lambdas = {fm.dmu_order[j]: float(v) for j, v in zip(ref, lam)}
    return DeaResult(
        dmu,
        _snap(float(theta), cfg.unity_tolerance),
        lambdas,
        tuple(map(float, s_in)),
        tuple(map(float, s_out)),
        Status.OPTIMAL,
        method,
        cfg.rts,
    )


def radial_efficiency(fm: FactorMatrix, dmu_index: int, cfg: DeaConfig = DeaConfig()) -> DeaResult:
    """Input-oriented radial (CCR/BCC) score of one DMU."""
    return _envelopment(fm, dmu_index, cfg, exclude_self=False, method=Method.RADIAL)


def super_efficiency(fm: FactorMatrix, dmu_index: int, cfg: DeaConfig = DeaConfig()) -> DeaResult:
    """Radial score against every DMU but the evaluated one.

    Efficient units can score above 1. Under VRS the program may have no
    feasible point; that comes back as ``Status.INFEASIBLE``, not an error.
    """
    if fm.n_dmu < 2:
        raise ValueError("super-efficiency needs at least two DMUs")
    return _envelopment(fm, dmu_index, cfg, exclude_self=True, method=Method.SUPER)


def sbm_efficiency(fm: FactorMatrix, dmu_index: int, cfg: DeaConfig = DeaConfig()) -> DeaResult:
    """Slack-based measure rho, linearized with the Charnes-Cooper transform.

    Variables are ``[t, Lambda, S-, S+]``; ``rho`` is the optimal objective and
    ``lambda = Lambda/t``, ``s = S/t``. Zero-valued outputs (or inputs) of the
    evaluated unit are left out of the corresponding average.
    """
    X, Y, xs, ys = _normalized(fm)
    n, m = X.shape
    s = Y.shape[1]
    x0, y0 = X[dmu_index], Y[dmu_index]
    dmu = fm.dmu_order[dmu_index]
    pos_in = x0 > 0
    pos_out = y0 > 0
    if not pos_out.all():
        if not cfg.sbm_zero_outputs:
            raise ZeroOutputUnsupported(f"{dmu} has a zero output")
        log.info("SBM for %s: dropping %d zero output(s) from the output average", dmu, int((~pos_out).sum()))
    m_eff = int(pos_in.sum())
    s_eff = int(pos_out.sum())
    vrs = cfg.rts is RTS.VRS
    nv = 1 + n + m + s
    k = 1 + m + s + (1 if vrs else 0)
    A = np.zeros((k, nv))
    b = np.zeros(k)
    rel = np.full(k, EQ, dtype=np.int64)
    c = np.zeros(nv)
    c[0] = 1.0
    c[1 + n : 1 + n + m][pos_in] = -1.0 / (m_eff * x0[pos_in])
    A[0, 0] = 1.0
    if s_eff:
        A[0, 1 + n + m :][pos_out] = 1.0 / (s_eff * y0[pos_out])
    b[0] = 1.0
    A[1 : 1 + m, 0] = -x0
    A[1 : 1 + m, 1 : 1 + n] = X.T
    A[1 : 1 + m, 1 + n : 1 + n + m] = np.eye(m)
    A[1 + m : 1 + m + s, 0] = -y0
    A[1 + m : 1 + m + s, 1 : 1 + n] = Y.T
    A[1 + m : 1 + m + s, 1 + n + m :] = -np.eye(s)
    if vrs:
        A[-1, 0] = -1.0
        A[-1, 1 : 1 + n] = 1.0
    status, z, rho = _solve(A, b, rel, c)
    if status is not LpStatus.OPTIMAL or z[0] <= 0:
        raise SolverFailure(f"SBM program for {dmu} did not reach an optimum ({status.value})")
    t = z[0]
    lam = z[1 : 1 + n] / t
    s_in = z[1 + n : 1 + n + m] / t * xs
    s_out = z[1 + n + m :] / t * ys
    return DeaResult(
        dmu,
        _snap(float(rho), cfg.unity_tolerance),
        {d: float(v) for d, v in zip(fm.dmu_order, lam)},
        tuple(map(float, s_in)),
        tuple(map(float, s_out)),
        Status.OPTIMAL,
        Method.SBM,
        cfg.rts,
    )


def scale_efficiency(crs: DeaResult, vrs: DeaResult) -> float:
    """CRS score over VRS score for the same DMU."""
    if crs.dmu != vrs.dmu:
        raise MismatchedInputs("results belong to different DMUs")
    if not (crs.optimal and vrs.optimal):
        raise MismatchedInputs("both results must be optimal")
    if crs.method is not Method.RADIAL or vrs.method is not Method.RADIAL:
        raise MismatchedInputs("scale efficiency needs radial scores")
    if crs.rts is not RTS.CRS or vrs.rts is not RTS.VRS:
        raise MismatchedInputs("expected one CRS and one VRS result")
    return crs.score / vrs.score


_DISPATCH = {
    Method.RADIAL: radial_efficiency,
    Method.SUPER: super_efficiency,
    Method.SBM: sbm_efficiency,
}


def run_all(fm: FactorMatrix, cfg: DeaConfig = DeaConfig()) -> list[DeaResult]:
    """Evaluate every DMU of ``fm``; per-DMU failures become ``Status.FAILED``."""
    try:
        fn = _DISPATCH[cfg.method]
    except KeyError:
        raise ValueError(f"run_all does not handle method {cfg.method.value}") from None
    results = []
    for i, dmu in enumerate(fm.dmu_order):
        try:
            results.append(fn(fm, i, cfg))
        except (DeaBenchError, ValueError) as exc:
            results.append(
                DeaResult(dmu, float("nan"), {}, (), (), Status.FAILED, cfg.method, cfg.rts, message=str(exc))
            )
    return results
