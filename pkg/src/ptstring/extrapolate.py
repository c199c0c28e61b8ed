"""Shanks acceleration of the lowest-eigenvalue estimates Z(s)^{-1/s}.

The classical transform

    S(A)_n = (A_{n+1} A_{n-1} - A_n^2) / (A_{n+1} + A_{n-1} - 2 A_n)

annihilates a geometric transient exactly.  Applied repeatedly to the
nine bound values A_s = Z(s)^{-1/s} of the linear density it produces a
sharp estimate of E_1(alpha); as a function of alpha the deepest transform
develops a genuine pole shortly before the first eigenvalue pair collides,
which makes the pole location itself an estimator of the critical point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sumrules import LINEAR_SUM_RULES, exact_sum_rule

MAX_DEPTH = 4  # 9 base entries support 4 two-step shortenings


class NegativeSumRuleError(ArithmeticError):
    """Some Z(s) <= 0: the spectrum is no longer entirely real-positive."""


class NoSingularityError(RuntimeError):
    """No pole of the accelerated estimate found in the scanned range."""


def shanks(seq) -> np.ndarray:
    """One Shanks transform; entries with a vanishing denominator become NaN."""
    a = np.asarray(seq, dtype=float)
    if len(a) < 3:
        raise ValueError("shanks needs at least 3 entries")
    num = a[2:] * a[:-2] - a[1:-1] ** 2
    den = a[2:] + a[:-2] - 2.0 * a[1:-1]
    scale = np.max(np.abs(a))
    out = np.full(len(a) - 2, np.nan)
    ok = np.abs(den) > 1e-14 * max(scale, 1.0)
    out[ok] = num[ok] / den[ok]
    return out


@dataclass
class ShanksTable:
    """Base sequence and all requested transform levels."""

    base_sequence: np.ndarray
    levels: list  # levels[k] has len(base) - 2k entries

    @property
    def deepest(self) -> float:
        for level in reversed(self.levels):
            vals = level[~np.isnan(level)]
            if len(vals):
                return float(vals[-1])
        raise ValueError("no valid entry in the Shanks table")


def shanks_table(seq, depth: int) -> ShanksTable:
    base = np.asarray(seq, dtype=float)
    if depth < 0 or 2 * depth >= len(base):
        raise ValueError(f"depth {depth} not supported by {len(base)} entries")
    levels = [base]
    for _ in range(depth):
        levels.append(shanks(levels[-1]))
    return ShanksTable(base, levels)


def bound_sequence(alpha: float) -> np.ndarray:
    """A_s = Z(s)^{-1/s} for s = 1..9 of the linear density."""
    vals = []
    for s in LINEAR_SUM_RULES:
        z = exact_sum_rule("linear_pt", s, alpha).value.real
        if z <= 0.0:
            raise NegativeSumRuleError(
                f"Z({s}) <= 0 at alpha={alpha}: spectrum not entirely real"
            )
        vals.append(z ** (-1.0 / s))
    return np.array(vals)


def e1_estimate(alpha: float, depth: int = 3) -> float:
    """Accelerated lowest-eigenvalue estimate for the linear density."""
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in 0..{MAX_DEPTH}")
    return shanks_table(bound_sequence(alpha), depth).deepest


def _final_denominator(alpha: float, depth: int) -> float:
    a = bound_sequence(alpha)
    for _ in range(depth - 1):
        a = shanks(a)
    if np.any(np.isnan(a[-3:])):
        return np.nan
    return float(a[-1] + a[-3] - 2.0 * a[-2])


def _alpha_domain_end(alpha_max: float) -> float:
    """Largest alpha <= alpha_max with all tabulated Z(s) still positive."""
    lo, hi = 0.0, alpha_max
    def all_positive(a):
        return all(exact_sum_rule("linear_pt", s, a).exact > 0 for s in LINEAR_SUM_RULES)
    if all_positive(hi):
        return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if all_positive(mid):
            lo = mid
        else:
            hi = mid
    return lo


def singularity_estimate(depth: int = 4, alpha_max: float = 10.0) -> float:
    """Smallest alpha > 0 where the depth-level estimate has a pole.

    Scans the final-level denominator for sign changes, refines each by
    bisection to 1e-6, and keeps only candidates where the estimate itself
    blows up (denominator zeros shared by the numerator are removable and
    are discarded).
    """
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in 1..{MAX_DEPTH}")
    end = _alpha_domain_end(alpha_max) - 1e-9
    grid = np.linspace(1e-3, end, 400)
    vals = np.array([_final_denominator(a, depth) for a in grid])
    for i in range(len(grid) - 1):
        d0, d1 = vals[i], vals[i + 1]
        if not (np.isfinite(d0) and np.isfinite(d1)) or d0 * d1 >= 0:
            continue
        lo, hi, flo = grid[i], grid[i + 1], d0
        while hi - lo > 1e-6:
            mid = 0.5 * (lo + hi)
            fm = _final_denominator(mid, depth)
            if not np.isfinite(fm):
                break
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
        root = 0.5 * (lo + hi)
        # pole test: the estimate must actually diverge approaching the root
        near = max(abs(_estimate_or_nan(root - 1e-6, depth)),
                   abs(_estimate_or_nan(root + 1e-6, depth)))
        far = max(abs(_estimate_or_nan(root - 1e-3, depth)),
                  abs(_estimate_or_nan(root + 1e-3, depth)), 1.0)
        if near > 10.0 * far:
            return root
    raise NoSingularityError(f"no pole of the accelerated estimate in (0, {alpha_max}]")


def _estimate_or_nan(alpha: float, depth: int) -> float:
    try:
        table = shanks_table(bound_sequence(alpha), depth)
    except NegativeSumRuleError:
        return np.nan
    last = table.levels[-1]
    return float(last[-1])
