"""ptstring: spectra of inhomogeneous strings with complex PT-symmetric density.

The eigenvalue problem -psi'' = E Sigma(x) psi on |x| <= 1/2 with Dirichlet
ends and Sigma(-x)* = Sigma(x) has spectra that are real or split into
complex-conjugate pairs.  This package provides:

* density models (uniform, linear and quadratic PT densities, the Borg
  string and its PT-symmetric counterpart, and the general solvable family),
* a sine-basis Rayleigh-Ritz pencil and a grid collocation cross-check,
* exact rational sum rules Z(s) = sum E_n^{-s} and eigenvalue bounds,
* Shanks acceleration of the bound sequence,
* exceptional-point location by real-count bisection plus determinant
  Newton, and power-law fits of the critical sequences,
* closed-form eigenfunctions, bilinear orthogonality and the PT-delta
  kernel for the solvable family.
"""

__version__ = "0.1.0"

from .collocation import CollocationGrid, build, spectrum_collocation
from .critical import (
    NEGATIVE_E,
    POSITIVE_E,
    CriticalPoint,
    bracket_and_bisect,
    count_real,
    critical_sequence,
    newton_refine,
)
from .density import (
    DensityModel,
    check_pt_symmetry,
    decompose_even_odd,
    evaluate,
    verify_density_ode,
)
from .discretize import (
    PencilMatrices,
    assemble,
    secular_derivative,
    secular_determinant,
)
from .eigen import ComplexSpectrum, eigenfunction, pencil_residual, spectrum
from .exact_solutions import (
    SolvableString,
    bilinear_gram,
    exact_eigenfunction,
    helmholtz_residual,
    isospectrality_check,
    pt_delta,
)
from .extrapolate import (
    ShanksTable,
    e1_estimate,
    shanks,
    shanks_table,
    singularity_estimate,
)
from .fitting import FitResult, conjecture_check, fit_critical
from .quadrature import adaptive_gauss_legendre
from .sumrules import (
    EigenvalueBounds,
    SumRuleValue,
    eigenvalue_bounds,
    exact_sum_rule,
    general_Z1,
    trace_sum_rule,
)

__all__ = [
    "DensityModel",
    "PencilMatrices",
    "ComplexSpectrum",
    "CollocationGrid",
    "CriticalPoint",
    "FitResult",
    "SolvableString",
    "SumRuleValue",
    "EigenvalueBounds",
    "ShanksTable",
    "POSITIVE_E",
    "NEGATIVE_E",
    "adaptive_gauss_legendre",
    "assemble",
    "bilinear_gram",
    "bracket_and_bisect",
    "build",
    "check_pt_symmetry",
    "conjecture_check",
    "count_real",
    "critical_sequence",
    "decompose_even_odd",
    "e1_estimate",
    "eigenfunction",
    "eigenvalue_bounds",
    "evaluate",
    "exact_eigenfunction",
    "exact_sum_rule",
    "fit_critical",
    "general_Z1",
    "helmholtz_residual",
    "isospectrality_check",
    "newton_refine",
    "pencil_residual",
    "pt_delta",
    "secular_derivative",
    "secular_determinant",
    "shanks",
    "shanks_table",
    "singularity_estimate",
    "spectrum",
    "spectrum_collocation",
    "trace_sum_rule",
    "verify_density_ode",
]
