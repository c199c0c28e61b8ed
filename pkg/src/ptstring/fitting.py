"""Nonlinear regression of critical-point data to y = b + c * x^(-s).

On the linear density and the positive branch of the quadratic density the
critical parameters follow alpha_n = b + c |e_n|^{-s} (alpha accumulates at
a finite b while |e_n| grows).  On the negative branch the roles invert --
alpha_n grows without bound while e_n accumulates -- so there the same
three-parameter law is fitted as e_n = b + c alpha_n^{-s}.  fit_critical
picks the orientation from the branch (overridable).

The solver is Gauss-Newton with Levenberg damping and a numeric Jacobian,
multistarted over s in {0.25, 0.5, 1, 2} since the model is nonconvex in s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .critical import NEGATIVE_E, CriticalPoint

S_MULTISTART = (0.25, 0.5, 1.0, 2.0)
JACOBIAN_STEP = 1e-7


class FitDataError(ValueError):
    """Too few points, mixed branches, or degenerate abscissae."""


@dataclass
class FitResult:
    b: float
    c: float
    s: float
    sigma_b: float
    sigma_c: float
    sigma_s: float
    residual_norm: float              # root-mean-square residual
    points_used: list                 # [(alpha_n, e_n)]
    orientation: str                  # "alpha_on_e" | "e_on_alpha"

    @property
    def params(self):
        return np.array([self.b, self.c, self.s])


def _levenberg(resid, p0, itmax=200):
    p = np.asarray(p0, dtype=float)
    r = resid(p)
    cost = float(r @ r)
    lam = 1e-3

    def jac(q):
        J = np.empty((len(r), len(q)))
        for k in range(len(q)):
            dq = np.zeros(len(q))
            dq[k] = JACOBIAN_STEP * max(1.0, abs(q[k]))
            J[:, k] = (resid(q + dq) - resid(q - dq)) / (2 * dq[k])
        return J

    for _ in range(itmax):
        J = jac(p)
        A = J.T @ J
        g = J.T @ r
        moved = False
        for _ in range(30):
            try:
                dp = np.linalg.solve(A + lam * np.diag(np.diag(A).clip(1e-30, None)), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            rn = resid(p + dp)
            cn = float(rn @ rn)
            if cn <= cost:
                p, r, cost = p + dp, rn, cn
                lam = max(lam * 0.3, 1e-14)
                moved = True
                break
            lam *= 10.0
        if not moved:
            break
        if np.linalg.norm(dp / np.maximum(1.0, np.abs(p))) < 1e-12:
            break
    return p, r, cost, jac


def _fit_power_law(y, x):
    """Best (b, c, s) for y = b + c x^(-s) over the multistart grid."""
    if np.ptp(x) == 0.0:
        raise FitDataError("all abscissae equal: Jacobian is singular")
    best = None
    for s0 in S_MULTISTART:
        i, j = int(np.argmin(x)), int(np.argmax(x))
        denom = x[i] ** (-s0) - x[j] ** (-s0)
        c0 = (y[i] - y[j]) / denom if denom != 0 else 1.0
        b0 = y[j] - c0 * x[j] ** (-s0)
        resid = lambda p: y - (p[0] + p[1] * x ** (-p[2]))
        p, r, cost, jac = _levenberg(resid, [b0, c0, s0])
        better = best is None or cost < best[2] - 1e-18
        tie = best is not None and abs(cost - best[2]) <= 1e-18 and p[2] < best[0][2]
        if better or tie:
            best = (p, r, cost, jac)
    p, r, cost, jac = best
    J = jac(p)
    dof = max(len(y) - 3, 1)
    try:
        cov = (cost / dof) * np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError as exc:
        raise FitDataError("singular Jacobian at the optimum") from exc
    sig = np.sqrt(np.abs(np.diag(cov)))
    return p, sig, np.sqrt(cost / len(y))


def _extract(points):
    alphas = np.array([p.alpha_c for p in points], dtype=float)
    es = np.array([p.e_c for p in points], dtype=float)
    return alphas, es


def fit_critical(points: list[CriticalPoint], orientation: str | None = None) -> FitResult:
    """Fit the three-parameter law to a single-branch critical sequence.

    orientation defaults to "e_on_alpha" for the negative branch and
    "alpha_on_e" otherwise (see module docstring).
    """
    if len(points) < 4:
        raise FitDataError("need at least 4 critical points to fit 3 parameters")
    branches = {p.branch for p in points}
    if len(branches) > 1:
        raise FitDataError("cannot fit across branches; pass one branch at a time")
    if orientation is None:
        orientation = "e_on_alpha" if branches == {NEGATIVE_E} else "alpha_on_e"
    alphas, es = _extract(points)
    if orientation == "alpha_on_e":
        y, x = alphas, np.abs(es)
    elif orientation == "e_on_alpha":
        y, x = es, np.abs(alphas)
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    p, sig, rms = _fit_power_law(y, x)
    return FitResult(
        b=float(p[0]),
        c=float(p[1]),
        s=float(p[2]),
        sigma_b=float(sig[0]),
        sigma_c=float(sig[1]),
        sigma_s=float(sig[2]),
        residual_norm=float(rms),
        points_used=[(float(a), float(e)) for a, e in zip(alphas, es)],
        orientation=orientation,
    )


def conjecture_check(points: list[CriticalPoint]) -> np.ndarray:
    """Relative deviations of alpha_n from 2 + 1/sqrt(2 e_n), per point.

    Only meaningful on the positive-e branch of the quadratic density, where
    the relation is conjectured to become exact asymptotically.
    """
    if any(p.branch != "positive_e" for p in points):
        raise FitDataError("conjecture applies to the positive-e branch only")
    if len(points) < 4:
        raise FitDataError("need at least 4 points")
    alphas, es = _extract(points)
    if np.any(es <= 0):
        raise FitDataError("conjecture applies to positive coalesced eigenvalues")
    pred = 2.0 + 1.0 / np.sqrt(2.0 * es)
    return np.abs(alphas - pred) / alphas
