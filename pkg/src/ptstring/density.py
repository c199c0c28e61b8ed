"""String density models Sigma(x) on the unit-length interval |x| <= 1/2.

A density is PT-symmetric when Sigma(-x)* = Sigma(x); equivalently the even
part of Sigma is real and the odd part is purely imaginary.  The family
implemented here:

    uniform          Sigma = 1
    linear_pt        Sigma = 1 + i*alpha*x
    quadratic_pt     Sigma = (1 + i*alpha*x)^2
    borg             Sigma = 16(alpha+1)^2 / (2 alpha x + alpha + 2)^4
    pt_borg          Sigma = (alpha^2+64)^2 / (16 (alpha x + 4i)^4)
    solvable_family  Sigma = 256 c1^2 / (c1^2 (c2+x)^2 - 256 kappa)^2

The last three satisfy the nonlinear density equation

    4 Sigma'' Sigma - 5 Sigma'^2 - 16 kappa Sigma^3 = 0

(with kappa = 0 for borg and pt_borg, and the constructor kappa for the
general family), which is what makes their spectra available in closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

HALF_LENGTH = 0.5  # strings live on [-1/2, 1/2]

PT_TOLERANCE = 1e-12

KINDS = ("uniform", "linear_pt", "quadratic_pt", "borg", "pt_borg", "solvable_family")

_ALPHA_KINDS = ("linear_pt", "quadratic_pt", "borg", "pt_borg")


class DomainError(ValueError):
    """Evaluation point outside |x| <= 1/2."""


class ParameterError(ValueError):
    """Model parameters violate their constraints."""


class SingularityError(ArithmeticError):
    """Density denominator vanishes at (or within 1e-14 of) the point."""


@dataclass(frozen=True)
class DensityModel:
    """Immutable description of one string density.

    alpha is required for the parametric kinds; c1, c2, kappa only for
    solvable_family.  pt_symmetric is computed at construction on a 101-point
    grid and is False only for solvable_family members that break the
    symmetry (e.g. a real shift c2).
    """

    kind: str
    alpha: float = 0.0
    c1: complex = 0.0 + 0.0j
    c2: complex = 0.0 + 0.0j
    kappa: float = 0.0
    pt_symmetric: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown density kind {self.kind!r}")
        if self.kind == "borg" and not self.alpha > -1.0:
            raise ParameterError("borg density requires alpha > -1")
        if self.kind == "solvable_family" and self.c1 == 0:
            raise ParameterError("solvable_family requires c1 != 0")
        if self.kind == "solvable_family":
            ok, _ = check_pt_symmetry(self, 101)
            object.__setattr__(self, "pt_symmetric", ok)

    # -- constructors ------------------------------------------------------

    @classmethod
    def uniform(cls) -> "DensityModel":
        return cls("uniform")

    @classmethod
    def linear_pt(cls, alpha: float) -> "DensityModel":
        return cls("linear_pt", alpha=float(alpha))

    @classmethod
    def quadratic_pt(cls, alpha: float) -> "DensityModel":
        return cls("quadratic_pt", alpha=float(alpha))

    @classmethod
    def borg(cls, alpha: float) -> "DensityModel":
        return cls("borg", alpha=float(alpha))

    @classmethod
    def pt_borg(cls, alpha: float) -> "DensityModel":
        return cls("pt_borg", alpha=float(alpha))

    @classmethod
    def solvable_family(cls, c1: complex, c2: complex, kappa: float) -> "DensityModel":
        return cls("solvable_family", c1=complex(c1), c2=complex(c2), kappa=float(kappa))

    # -- JSON wire format (shared with the CLI) -----------------------------

    @classmethod
    def from_json(cls, obj) -> "DensityModel":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = str(obj["kind"]).lower().replace("-", "_")
        if kind == "solvable_family":
            c1 = complex(*obj.get("c1", (0.0, 0.0)))
            c2 = complex(*obj.get("c2", (0.0, 0.0)))
            return cls.solvable_family(c1, c2, float(obj.get("kappa", 0.0)))
        if kind in _ALPHA_KINDS:
            return cls(kind, alpha=float(obj["alpha"]))
        if kind == "uniform":
            return cls.uniform()
        raise ParameterError(f"unknown density kind {obj['kind']!r}")

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind in _ALPHA_KINDS:
            out["alpha"] = self.alpha
        if self.kind == "solvable_family":
            out["c1"] = [self.c1.real, self.c1.imag]
            out["c2"] = [self.c2.real, self.c2.imag]
            out["kappa"] = self.kappa
        return out

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def matching_kappa(self) -> float:
        """kappa for which this model satisfies the density equation."""
        if self.kind == "solvable_family":
            return self.kappa
        return 0.0  # uniform, borg and pt_borg all solve the ODE with kappa=0


def _check_domain(x):
    if np.any(np.abs(x) > HALF_LENGTH + 1e-15):
        raise DomainError("evaluation point outside |x| <= 1/2")


def evaluate(model: DensityModel, x):
    """Sigma(x); accepts scalars or arrays, returns complex values."""
    xa = np.asarray(x, dtype=float)
    _check_domain(xa)
    if model.kind == "uniform":
        out = np.ones_like(xa, dtype=complex)
    elif model.kind == "linear_pt":
        out = 1.0 + 1j * model.alpha * xa
    elif model.kind == "quadratic_pt":
        out = (1.0 + 1j * model.alpha * xa) ** 2
    elif model.kind == "borg":
        den = (2 * model.alpha * xa + model.alpha + 2.0) ** 4
        _check_singular(den)
        out = 16 * (model.alpha + 1.0) ** 2 / den.astype(complex)
    elif model.kind == "pt_borg":
        den = 16 * (model.alpha * xa + 4j) ** 4
        _check_singular(den)
        out = (model.alpha**2 + 64.0) ** 2 / den
    else:  # solvable_family
        den = (model.c1**2 * (model.c2 + xa) ** 2 - 256.0 * model.kappa) ** 2
        _check_singular(den)
        out = 256.0 * model.c1**2 / den
    if np.isscalar(x) or np.ndim(x) == 0:
        return complex(out)
    return out


def _check_singular(den):
    if np.any(np.abs(den) < 1e-14):
        raise SingularityError("density denominator vanishes at evaluation point")


def derivatives(model: DensityModel, x):
    """(Sigma'(x), Sigma''(x)) from the closed forms."""
    xa = np.asarray(x, dtype=float)
    _check_domain(xa)
    a = model.alpha
    if model.kind == "uniform":
        z = np.zeros_like(xa, dtype=complex)
        return z, z.copy()
    if model.kind == "linear_pt":
        return np.full_like(xa, 1j * a, dtype=complex), np.zeros_like(xa, dtype=complex)
    if model.kind == "quadratic_pt":
        return 2j * a * (1.0 + 1j * a * xa), np.full_like(xa, -2.0 * a**2, dtype=complex)
    if model.kind == "borg":
        g = (2 * a * xa + a + 2.0).astype(complex)
        A = 16 * (a + 1.0) ** 2
        return -8 * a * A / g**5, 80 * a**2 * A / g**6
    if model.kind == "pt_borg":
        g = model.alpha * xa + 4j
        A = (a**2 + 64.0) ** 2 / 16.0
        return -4 * a * A / g**5, 20 * a**2 * A / g**6
    # solvable_family: Sigma = 256 c1^2 * q^-2 with q = c1^2 (c2+x)^2 - 256 kappa
    c1sq = model.c1**2
    q = c1sq * (model.c2 + xa) ** 2 - 256.0 * model.kappa
    qp = 2 * c1sq * (model.c2 + xa)
    qpp = 2 * c1sq
    pref = 256.0 * c1sq
    first = -2 * pref * qp / q**3
    second = pref * (6 * qp**2 - 2 * q * qpp) / q**4
    return first, second


def check_pt_symmetry(model: DensityModel, grid_size: int):
    """Max deviation of Sigma(-x)* - Sigma(x) on a symmetric grid.

    Returns (is_pt, max_relative_deviation); the threshold is PT_TOLERANCE.
    """
    if grid_size < 2:
        raise ParameterError("grid_size must be >= 2")
    xs = np.linspace(-HALF_LENGTH, HALF_LENGTH, grid_size)
    s = evaluate(model, xs)
    s_mirror = evaluate(model, -xs)
    dev = np.max(np.abs(np.conj(s_mirror) - s) / (1.0 + np.abs(s)))
    return bool(dev <= PT_TOLERANCE), float(dev)


def decompose_even_odd(model: DensityModel, x):
    """(Re Sigma, Im Sigma); for PT models these are the even/odd parts."""
    s = evaluate(model, x)
    return s.real, s.imag


def verify_density_ode(model: DensityModel, x, kappa: float, analytic: bool = True):
    """Normalized residual of 4 Sigma'' Sigma - 5 Sigma'^2 - 16 kappa Sigma^3.

    With analytic=False the derivatives come from 4th-order central
    differences with step 1e-5 (points too close to the ends are clipped
    inward so the stencil stays inside the domain).
    """
    s = evaluate(model, x)
    if analytic:
        sp, spp = derivatives(model, x)
    else:
        h = 1e-5
        xa = np.clip(np.asarray(x, dtype=float), -HALF_LENGTH + 2 * h, HALF_LENGTH - 2 * h)
        f = lambda t: evaluate(model, t)
        sp = (-f(xa + 2 * h) + 8 * f(xa + h) - 8 * f(xa - h) + f(xa - 2 * h)) / (12 * h)
        spp = (-f(xa + 2 * h) + 16 * f(xa + h) - 30 * f(xa) + 16 * f(xa - h) - f(xa - 2 * h)) / (
            12 * h**2
        )
    resid = 4 * spp * s - 5 * sp**2 - 16 * kappa * s**3
    return float(np.max(np.abs(resid) / (1.0 + np.abs(s) ** 3)))
