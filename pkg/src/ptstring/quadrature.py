"""Adaptive panel Gauss-Legendre quadrature for complex-valued integrands.

The integrands assembled elsewhere in this package (density matrix elements,
sigma transforms, bilinear Gram entries) are smooth complex functions of a
real variable on a finite interval, so a fixed-order panel rule with
bisection refinement is both simple and fast.  Each panel uses 16 nodes; a
panel is accepted when the two-half refinement changes its estimate by less
than its share of the absolute tolerance.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

_NODES, _WEIGHTS = leggauss(16)


class QuadratureError(RuntimeError):
    """Raised when the panel budget is exhausted before reaching tolerance."""


def gauss_legendre(f, a: float, b: float, n: int = 64) -> complex:
    """Fixed n-point Gauss-Legendre estimate of int_a^b f(x) dx."""
    nodes, weights = leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * np.sum(weights * f(mid + half * nodes))


def adaptive_gauss_legendre(
    f,
    a: float,
    b: float,
    tol: float = 1e-12,
    max_panels: int = 2**14,
) -> complex:
    """Integrate a (complex) function over [a, b] to absolute tolerance tol.

    f must accept a numpy array of nodes and return values of the same shape.
    Raises QuadratureError if more than max_panels panels would be needed.
    """
    if a == b:
        return 0.0 + 0.0j
    length = abs(b - a)

    def panel(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return half * np.sum(_WEIGHTS * f(mid + half * _NODES))

    stack = [(float(a), float(b), panel(a, b))]
    total = 0.0 + 0.0j
    n_panels = 1
    while stack:
        lo, hi, est = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = panel(lo, mid), panel(mid, hi)
        err = abs(left + right - est)
        if err <= tol * abs(hi - lo) / length:
            total += left + right
            continue
        if n_panels + 1 > max_panels:
            raise QuadratureError(
                f"quadrature did not reach tol={tol} within {max_panels} panels"
            )
        n_panels += 1
        stack.append((lo, mid, left))
        stack.append((mid, hi, right))
    return total
