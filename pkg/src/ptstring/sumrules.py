"""Spectral sum rules Z(s) = sum_n E_n^{-s} for the Dirichlet string.

Two routes are provided and cross-checked:

* exact_sum_rule: closed-form polynomials in the density parameter alpha,
  stored with exact rational coefficients (linear density: s = 1..9,
  quadratic density: s = 1..7).  At alpha = 0 every polynomial reduces to
  the uniform-string value sum (n^2 pi^2)^{-s} = zeta(2s)/pi^{2s}.

* trace_sum_rule: Z_N(s) = trace[(D^{-1} S)^s] on an assembled pencil, whose
  N -> infinity limit is the sum rule.  The truncation error is dominated by
  the diagonal tail sum_{n>N} (S_nn / n^2 pi^2)^s, which is summed in closed
  form (Hurwitz zeta) and added back when tail_correction is on.

Z(1) additionally has the density-integral form
Z(1) = int (1/4 - x^2) Re Sigma(x) dx, used as yet another cross-check.

Positive sum rules bound the lowest eigenvalue:
Z(s)^{-1/s} <= E_1 <= Z(s)/Z(s+1); a sign change of Z(s) in alpha signals
that the spectrum can no longer be entirely real.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Fr
from math import comb

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .density import DensityModel
from .discretize import PencilMatrices
from .quadrature import adaptive_gauss_legendre

# -- exact polynomial tables: {s: {alpha-power: coefficient}} ---------------

LINEAR_SUM_RULES = {
    1: {0: Fr(1, 6)},
    2: {0: Fr(1, 90), 2: Fr(-1, 5040)},
    3: {0: Fr(1, 945), 2: Fr(-1, 30240)},
    4: {0: Fr(1, 9450), 2: Fr(-17, 3742200), 4: Fr(197, 10897286400)},
    5: {0: Fr(1, 93555), 2: Fr(-59, 102162060), 4: Fr(17, 3269185920)},
    6: {
        0: Fr(691, 638512875),
        2: Fr(-359, 5108103000),
        4: Fr(16771, 16672848192000),
        6: Fr(-2341, 1364608498176000),
    },
    7: {
        0: Fr(2, 18243225),
        2: Fr(-1237, 148864716000),
        4: Fr(46667, 285105704083200),
        6: Fr(-15773, 22808456326656000),
    },
    8: {
        0: Fr(3617, 325641566250),
        2: Fr(-68197, 70871446327500),
        4: Fr(736579, 30490471131120000),
        6: Fr(-689371, 3986227909984320000),
        8: Fr(8458133, 51894121836144107520000),
    },
    9: {
        0: Fr(43867, 38979295480125),
        2: Fr(-627073, 5716963337085000),
        4: Fr(5281763, 1577881881035460000),
        6: Fr(-114268283, 3308250267054186854400),
        8: Fr(111789019, 1323300106821674741760000),
    },
}

QUADRATIC_SUM_RULES = {
    1: {0: Fr(1, 6), 2: Fr(-1, 120)},
    2: {0: Fr(1, 90), 2: Fr(-1, 630), 4: Fr(1, 50400)},
    3: {0: Fr(1, 945), 2: Fr(-1, 4200), 4: Fr(1, 92400), 6: Fr(-29, 432432000)},
    4: {
        0: Fr(1, 9450),
        2: Fr(-1, 31185),
        4: Fr(1499, 567567000),
        6: Fr(-23, 378378000),
        8: Fr(251, 1029188160000),
    },
    5: {
        0: Fr(1, 93555),
        2: Fr(-691, 170270100),
        4: Fr(83, 170270100),
        6: Fr(-3313, 154378224000),
        8: Fr(773, 2514159648000),
        10: Fr(-3221, 3519823507200000),
    },
    6: {
        0: Fr(691, 638512875),
        2: Fr(-1, 2027025),
        4: Fr(15047, 192972780000),
        6: Fr(-1204631, 230988417660000),
        8: Fr(1646627, 11292767085600000),
        10: Fr(-759931, 519467285937600000),
        12: Fr(16965349, 4862213796375936000000),
    },
    7: {
        0: Fr(2, 18243225),
        2: Fr(-3617, 62026965000),
        4: Fr(565843, 49497518070000),
        6: Fr(-7523137, 7259635983600000),
        8: Fr(3219703, 71559268981200000),
        10: Fr(-460458127, 520951478183136000000),
        12: Fr(211469, 31572816859584000000),
        14: Fr(-5405503, 402869143128291840000000),
    },
}

_TABLES = {"linear_pt": LINEAR_SUM_RULES, "quadratic_pt": QUADRATIC_SUM_RULES}


class SumRuleRangeError(ValueError):
    """Requested s outside the tabulated range for this density."""


@dataclass
class SumRuleValue:
    """One sum-rule value with provenance."""

    s: int
    value: complex
    method: str                       # "exact" | "trace" | "integral"
    exact: Fr | None = None           # rational value, exact method only
    trunc_N: int | None = None        # trace method only
    trunc_error: float | None = None  # estimated remaining truncation error


def _model_kind(model) -> str:
    if isinstance(model, DensityModel):
        return model.kind
    return str(model)


def sum_rule_range(model) -> range:
    kind = _model_kind(model)
    if kind not in _TABLES:
        raise SumRuleRangeError(f"no exact sum rules tabulated for {kind!r}")
    return range(1, max(_TABLES[kind]) + 1)


def exact_sum_rule(model, s: int, alpha) -> SumRuleValue:
    """Closed-form Z(s; alpha), evaluated in exact rational arithmetic.

    alpha may be an int, Fraction, or float (floats are converted exactly,
    so integer-valued floats keep the table comparisons exact).
    """
    kind = _model_kind(model)
    table = _TABLES.get(kind)
    if table is None or s not in table:
        raise SumRuleRangeError(f"Z({s}) not tabulated for {kind!r}")
    a = alpha if isinstance(alpha, (int, Fr)) else Fr(float(alpha))
    val = sum((c * a**p for p, c in table[s].items()), Fr(0))
    return SumRuleValue(s, float(val), "exact", exact=val)


def general_Z1(model: DensityModel, tol: float = 1e-12) -> SumRuleValue:
    """Z(1) = int (1/4 - x^2) Re Sigma(x) dx for any PT-symmetric density."""
    if not model.pt_symmetric:
        raise ValueError("Z(1) integral form requires a PT-symmetric density")
    val = adaptive_gauss_legendre(
        lambda x: (0.25 - x**2) * model(x).real, -0.5, 0.5, tol=tol
    )
    return SumRuleValue(1, complex(val).real, "integral")


def _diagonal_tail_coefficients(pencil: PencilMatrices):
    """S_nn ~ c0 + c1/n^2 for large n; exact for the polynomial densities."""
    model = pencil.model
    if model.kind == "uniform":
        return 1.0, 0.0
    if model.kind == "linear_pt":
        return 1.0, 0.0
    if model.kind == "quadratic_pt":
        return 1.0 - model.alpha**2 / 12.0, model.alpha**2 / (2.0 * np.pi**2)
    # generic: S_nn -> int Sigma dx by Riemann-Lebesgue
    c0 = adaptive_gauss_legendre(lambda x: model(x), -0.5, 0.5, tol=1e-12)
    return complex(c0).real, 0.0


def trace_sum_rule(
    pencil: PencilMatrices, s: int, tail_correction: bool = True
) -> SumRuleValue:
    """Z_N(s) = trace[(D^{-1} S)^s], optionally with the diagonal-tail sum.

    The tail sum_{n>N} (c0 + c1/n^2)^s / (n^2 pi^2)^s is evaluated with
    Hurwitz zeta functions; what remains unaccounted (off-diagonal paths
    through truncated indices) is reported as trunc_error.
    """
    if s < 1:
        raise ValueError("sum-rule order s must be >= 1")
    N = pencil.dim
    # keep only D^{-1}S and the highest power reached so far (N can be large)
    cache = pencil._cache.setdefault(("trace_powers",), {})
    A = cache.get("A")
    if A is None:
        A = cache["A"] = pencil.density_matrix / pencil.stiffness[:, None]
    k, P = cache.get("last", (1, A))
    if k > s:
        k, P = 1, A
    while k < s:
        P = P @ A
        k += 1
    cache["last"] = (k, P)
    val = complex(np.trace(P))
    c0, c1 = _diagonal_tail_coefficients(pencil)
    tail = sum(
        comb(s, j) * c0 ** (s - j) * c1**j * float(hurwitz_zeta(2 * s + 2 * j, N + 1))
        for j in range(s + 1)
    ) / np.pi ** (2 * s)
    if tail_correction:
        val += tail
        # leading omitted piece: nearest off-diagonal paths, O(N^-(2s+1))
        err = abs(c0) ** s / np.pi ** (2 * s) * (2 * s + 1) / max(N, 1) ** (2 * s + 1)
    else:
        err = abs(tail)
    return SumRuleValue(s, val, "trace", trunc_N=N, trunc_error=float(err))


@dataclass
class EigenvalueBounds:
    """Sandwich Z(s)^{-1/s} <= E_1 <= Z(s)/Z(s+1), or a complex-spectrum flag."""

    s: int
    lower: float
    upper: float
    complex_spectrum_signaled: bool = False


def eigenvalue_bounds(model, s: int, alpha) -> EigenvalueBounds:
    """Lowest-eigenvalue bounds from consecutive sum rules.

    When Z(s) or Z(s+1) is not positive the bounds lose meaning and the
    result carries complex_spectrum_signaled instead.
    """
    zs = exact_sum_rule(model, s, alpha).exact
    zs1 = exact_sum_rule(model, s + 1, alpha).exact
    if zs <= 0 or zs1 <= 0:
        return EigenvalueBounds(s, np.nan, np.nan, complex_spectrum_signaled=True)
    return EigenvalueBounds(s, float(zs) ** (-1.0 / s), float(zs / zs1))
