"""Location of exceptional points (alpha_n, e_n) where eigenvalue pairs collide.

Strategy (two stages, because Newton on a double root alone has a tiny
basin):

1. The number of real eigenvalues on the tracked branch jumps by 2 at a
   collision.  Scanning alpha and bisecting the jump brackets the critical
   parameter; the colliding pair is identified as the closest-spaced pair of
   branch-sign real eigenvalues on the real side of the bracket.

2. Damped Newton iteration on the smooth 2x2 system

       { F(E, alpha) = 0,  dF/dE(E, alpha) = 0 }

   with F the log-scaled secular determinant.  The Jacobian at a generic
   exceptional point is nonsingular (F_alpha * F_EE != 0), so this polishes
   the point to solver precision even where eigenvalue classification has
   long become noise-limited.

For deep pairs the classification stage is unreliable (the collisions
accumulate and the eigenvalue condition number diverges), so the sequence
builder switches to predictor-guided Newton continuation: e_{n+1} is
extrapolated quadratically, the alpha gap geometrically.

Every reported point is validated at two truncations (N and 3N/2) with
1e-6 relative agreement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityModel
from .discretize import PencilMatrices, assemble, secular_pair
from .eigen import spectrum

POSITIVE_E = "positive_e"
NEGATIVE_E = "negative_e"

COUNT_REALITY_TOL = 1e-8
SEED_REALITY_TOL = 1e-3  # looser: collision candidates carry solver noise


class NoTransitionError(RuntimeError):
    """Real-eigenvalue count does not change across the given bracket."""


class NewtonNonConvergenceError(RuntimeError):
    """Newton refinement failed and no bisection fallback was supplied."""


class TruncationDisagreementError(RuntimeError):
    """Two-truncation validation of a critical point failed."""


@dataclass
class CriticalPoint:
    index: int
    alpha_c: float
    e_c: float
    branch: str                    # positive_e | negative_e
    refinement_residual: tuple     # log10 of final scaled (|F|, |dF/dE|)
    trunc_N: int
    degraded: bool = False


# -- counting ----------------------------------------------------------------


def _with_alpha(model: DensityModel, alpha: float) -> DensityModel:
    return DensityModel(model.kind, alpha=float(alpha))


def _ordered_eigenvalues(model: DensityModel, alpha: float, N: int) -> np.ndarray:
    pencil = assemble(_with_alpha(model, alpha), N)
    w = spectrum(pencil).eigenvalues
    if model.kind == "quadratic_pt":
        return w[np.argsort(np.abs(w))]
    return w  # already ascending by real part


def count_real(model: DensityModel, alpha: float, N: int, K: int) -> int:
    """Real eigenvalues among the first K (by |E| for the quadratic density,
    by real part otherwise), at reality tolerance 1e-8 (1 + |E|)."""
    if K > N:
        raise ValueError("K must not exceed N")
    w = _ordered_eigenvalues(model, alpha, N)[:K]
    return int(np.sum(np.abs(w.imag) <= COUNT_REALITY_TOL * (1.0 + np.abs(w))))


def _branch_count(model, alpha, N, K, branch) -> int:
    w = _ordered_eigenvalues(model, alpha, N)[:K]
    real = np.abs(w.imag) <= COUNT_REALITY_TOL * (1.0 + np.abs(w))
    sign = (w.real > 0) if branch == POSITIVE_E else (w.real < 0)
    return int(np.sum(real & sign))


def _seed_from_closest_pair(model, alpha, N, branch):
    """Mean of the closest-spaced pair of branch-sign (nearly) real eigenvalues."""
    w = _ordered_eigenvalues(model, alpha, N)
    near_real = np.abs(w.imag) <= SEED_REALITY_TOL * (1.0 + np.abs(w))
    sign = (w.real > 0) if branch == POSITIVE_E else (w.real < 0)
    vals = np.sort(w[near_real & sign].real)
    if len(vals) < 2:
        raise NoTransitionError("fewer than two branch-sign real eigenvalues at seed")
    gaps = np.diff(vals) / np.maximum(1.0, np.abs(vals[:-1]))
    i = int(np.argmin(gaps))
    return 0.5 * (vals[i] + vals[i + 1])


# -- stage 1: bracketing -------------------------------------------------------


def bracket_and_bisect(
    model: DensityModel,
    pair_index: int,
    alpha_lo: float,
    alpha_hi: float,
    N: int,
    branch: str = POSITIVE_E,
    tol: float = 1e-10,
):
    """Bisect the alpha where the branch real-count crosses 2*pair_index.

    Returns (lo, hi) with hi - lo <= tol * max(1, alpha).
    """
    K = min(N, 2 * pair_index + 6)
    ind = lambda a: _branch_count(model, a, N, K, branch) >= 2 * pair_index
    ilo, ihi = ind(alpha_lo), ind(alpha_hi)
    if ilo == ihi:
        raise NoTransitionError(
            f"real-count indicator equal at both ends of [{alpha_lo}, {alpha_hi}]"
        )
    lo, hi = float(alpha_lo), float(alpha_hi)
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if ind(mid) == ilo:
            lo = mid
        else:
            hi = mid
    return lo, hi


# -- stage 2: determinant Newton ----------------------------------------------


def newton_refine(
    model: DensityModel,
    alpha0: float,
    E0: float,
    N: int,
    branch: str | None = None,
    h: float = 1e-5,
    itmax: int = 50,
    fallback: tuple | None = None,
) -> CriticalPoint:
    """Polish (alpha, E) on {F = 0, dF/dE = 0} with damped Newton steps.

    All determinant values share one log-magnitude reference so the Newton
    steps are scale-invariant.  Converged when both scaled residuals have
    dropped ten orders of magnitude from entry (or the step has stagnated at
    solver precision).  On failure returns the fallback bracket result with
    degraded=True, or raises if none was given.
    """
    pencils: dict[float, PencilMatrices] = {}

    def pencil_at(alpha):
        p = pencils.get(alpha)
        if p is None:
            p = pencils[alpha] = assemble(_with_alpha(model, alpha), N)
        return p

    logref = secular_pair(pencil_at(alpha0), E0)[0].log_magnitude

    def FFE(E, alpha):
        F, FE = secular_pair(pencil_at(alpha), E)
        return F.scaled_by(logref).real, FE.scaled_by(logref).real

    E, alpha = float(E0), float(alpha0)
    F0, FE0 = FFE(E, alpha)
    entry = (max(abs(F0), 1e-300), max(abs(FE0), 1e-300))
    stagnant = 0
    converged = False
    for _ in range(itmax):
        F, FE = FFE(E, alpha)
        hE = h * max(1.0, abs(E))
        ha = h * max(1.0, abs(alpha))
        Fp, FEp = FFE(E + hE, alpha)
        Fm, FEm = FFE(E - hE, alpha)
        Fap, FEap = FFE(E, alpha + ha)
        Fam, FEam = FFE(E, alpha - ha)
        J = np.array(
            [
                [FE, (Fap - Fam) / (2 * ha)],
                [(FEp - FEm) / (2 * hE), (FEap - FEam) / (2 * ha)],
            ]
        )
        try:
            dE, dalpha = np.linalg.solve(J, [-F, -FE])
        except np.linalg.LinAlgError:
            break
        # damping: never move more than ~10% of the local scales at once
        limit = max(abs(dE) / (0.1 * max(1.0, abs(E))), abs(dalpha) / (0.1 * max(1.0, abs(alpha))))
        if limit > 1.0:
            dE /= limit
            dalpha /= limit
        E += dE
        alpha += dalpha
        Fc, FEc = FFE(E, alpha)
        dropped = abs(Fc) <= 1e-10 * entry[0] and abs(FEc) <= 1e-10 * entry[1]
        small_step = (
            abs(dE) <= 1e-12 * max(1.0, abs(E)) and abs(dalpha) <= 1e-12 * max(1.0, abs(alpha))
        )
        stagnant = stagnant + 1 if small_step else 0
        if dropped or stagnant >= 2:
            converged = True
            break
    Ff, FEf = FFE(E, alpha)
    resid = (
        float(np.log10(max(abs(Ff), 1e-300))),
        float(np.log10(max(abs(FEf), 1e-300))),
    )
    br = branch or (POSITIVE_E if E > 0 else NEGATIVE_E)
    if converged:
        return CriticalPoint(0, alpha, E, br, resid, N)
    if fallback is not None:
        fa, fe = fallback
        return CriticalPoint(0, float(fa), float(fe), br, resid, N, degraded=True)
    raise NewtonNonConvergenceError(
        f"no exceptional point found from (alpha={alpha0}, E={E0}) in {itmax} iterations"
    )


# -- full sequences ------------------------------------------------------------

# scan windows: (alpha_start, alpha_stop, step, pairs resolvable by counting)
_SCAN = {
    ("linear_pt", POSITIVE_E): (3.3, 4.6, 0.02, 5),
    ("quadratic_pt", POSITIVE_E): (2.02, 2.30, 0.005, 4),
    ("quadratic_pt", NEGATIVE_E): (15.0, None, 5.0, 10**9),  # stop grows with count
}


def _scan_bracket(model, n, branch, N, scan_grid, memo):
    K = min(N, 2 * n + 6)

    def ind(a):
        got = memo.get(a)
        if got is None or got[1] < K:
            got = memo[a] = (_branch_count(model, a, N, K, branch), K)
        return got[0] >= 2 * n

    prev = ind(scan_grid[0])
    for a_prev, a in zip(scan_grid[:-1], scan_grid[1:]):
        if ind(a) != prev:
            return a_prev, a
        prev = ind(a)
    raise NoTransitionError(f"no real-count transition for pair {n} in scan window")


def _validated_point(model, n, alpha0, E0, N, branch):
    pt = newton_refine(model, alpha0, E0, N, branch=branch)
    check = newton_refine(model, pt.alpha_c, pt.e_c, (3 * N) // 2, branch=branch)
    rel = abs(check.alpha_c - pt.alpha_c) / max(1.0, abs(pt.alpha_c))
    if rel > 1e-6:
        raise TruncationDisagreementError(
            f"pair {n}: alpha_c differs by {rel:.2e} between N={N} and N={(3 * N) // 2}"
        )
    pt.index = n
    return pt


def critical_sequence(
    model: DensityModel, count: int, N: int, branch: str = POSITIVE_E
) -> list[CriticalPoint]:
    """First `count` critical points on one branch, two-truncation validated."""
    if count > 12:
        raise ValueError("count is limited to 12")
    if model.kind not in ("linear_pt", "quadratic_pt"):
        raise ValueError(f"critical sequences are defined for the parametric "
                         f"polynomial densities, not {model.kind!r}")
    if model.kind == "linear_pt" and branch != POSITIVE_E:
        raise ValueError("the linear density has no negative-eigenvalue branch")
    start, stop, step, max_counted = _SCAN[(model.kind, branch)]
    if stop is None:
        stop = start + 30.0 * (count + 1)
    scan_grid = np.arange(start, stop + step, step)
    N_scan = min(N, 128)
    memo: dict = {}
    points: list[CriticalPoint] = []
    for n in range(1, count + 1):
        if n <= max_counted:
            a_lo, a_hi = _scan_bracket(model, n, branch, N_scan, scan_grid, memo)
            lo, hi = bracket_and_bisect(model, n, a_lo, a_hi, N_scan, branch, tol=1e-4)
            K = min(N_scan, 2 * n + 6)
            real_side = lo if _branch_count(model, lo, N_scan, K, branch) >= 2 * n else hi
            if _branch_count(model, real_side, N_scan, K, branch) < 2 * n:
                real_side = hi if real_side == lo else lo
            E0 = _seed_from_closest_pair(model, real_side, N_scan, branch)
            points.append(_validated_point(model, n, 0.5 * (lo + hi), E0, N, branch))
        else:
            # predictor-guided continuation for deep pairs
            es = np.array([p.e_c for p in points])
            als = np.array([p.alpha_c for p in points])
            k = len(points)
            kk = np.arange(k - 2, k + 1, dtype=float)
            A = np.vstack([kk**2, kk, np.ones(3)]).T
            coef = np.linalg.solve(A, es[-3:])
            e_pred = float(coef @ [(k + 1) ** 2, k + 1, 1.0])
            limit = 2.0 if (model.kind == "quadratic_pt" and branch == POSITIVE_E) else 0.0
            gamma = (als[-1] - limit) * np.sqrt(abs(es[-1] / e_pred))
            if model.kind == "linear_pt":
                # alpha gaps shrink roughly geometrically toward the limit
                ratio = (als[-1] - als[-2]) / (als[-2] - als[-3])
                a_pred = als[-1] + (als[-1] - als[-2]) * np.clip(ratio, 0.0, 1.0)
            else:
                a_pred = limit + gamma
            points.append(_validated_point(model, n, float(a_pred), e_pred, N, branch))
    if model.kind == "linear_pt":
        alphas = [p.alpha_c for p in points]
        if any(alphas[i] <= alphas[i + 1] for i in range(len(alphas) - 1)):
            raise RuntimeError("critical values are not strictly decreasing")
    return points
