"""Rayleigh-Ritz matrices in the Fourier sine basis.

Basis functions u_m(x) = sqrt(2) sin(m pi (x + 1/2)) are orthonormal on
[-1/2, 1/2] and satisfy -u_m'' = m^2 pi^2 u_m, so the eigenvalue problem
-psi'' = E Sigma psi truncates to the N x N pencil

    D c = E S c,   D = diag(n^2 pi^2),   S_mn = int u_m Sigma u_n dx.

For the polynomial densities the moments

    X_mn = int x   u_m u_n dx
    Y_mn = int x^2 u_m u_n dx

have closed forms (derived by product-to-sum reduction and validated against
the quadrature path in the tests):

    X_mn = (2/pi^2) (1/(m+n)^2 - 1/(m-n)^2)          m+n odd, else 0
    Y_nn = 1/12 - 1/(2 n^2 pi^2)
    Y_mn = (2/pi^2) (1/(m-n)^2 - 1/(m+n)^2)          m != n, m+n even, else 0

Other densities are integrated by adaptive Gauss-Legendre panels.

Determinants of D - E S grow like prod n^2 pi^2 and overflow quickly, so the
secular determinant is carried as (log magnitude, phase) with the direct
value materialized only when representable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .density import DensityModel, evaluate
from .quadrature import adaptive_gauss_legendre

QUADRATURE_TOL = 1e-12


class SingularPencilError(ArithmeticError):
    """D - E S is numerically singular (E is an eigenvalue)."""


def stiffness_diagonal(N: int) -> np.ndarray:
    """Diagonal of D: n^2 pi^2, n = 1..N."""
    return (np.arange(1, N + 1) * np.pi) ** 2


def sine_basis(m, x):
    """u_m(x) = sqrt(2) sin(m pi (x + 1/2)); m may be an int or array."""
    return np.sqrt(2.0) * np.sin(np.multiply.outer(m, np.pi * (np.asarray(x) + 0.5)))


def moment_matrix_x(N: int) -> np.ndarray:
    """X_mn = int x u_m u_n dx for m, n = 1..N."""
    m = np.arange(1, N + 1)
    M, Nn = np.meshgrid(m, m, indexing="ij")
    X = np.zeros((N, N))
    odd = (M + Nn) % 2 == 1
    X[odd] = (2.0 / np.pi**2) * (1.0 / (M + Nn)[odd] ** 2 - 1.0 / (M - Nn)[odd] ** 2)
    return X


def moment_matrix_x2(N: int) -> np.ndarray:
    """Y_mn = int x^2 u_m u_n dx for m, n = 1..N."""
    m = np.arange(1, N + 1)
    M, Nn = np.meshgrid(m, m, indexing="ij")
    Y = np.zeros((N, N))
    off = ((M + Nn) % 2 == 0) & (M != Nn)
    Y[off] = (2.0 / np.pi**2) * (1.0 / (M - Nn)[off] ** 2 - 1.0 / (M + Nn)[off] ** 2)
    Y[np.diag_indices(N)] = 1.0 / 12.0 - 1.0 / (2.0 * m**2 * np.pi**2)
    return Y


@dataclass
class PencilMatrices:
    """Assembled truncation of the string eigenvalue pencil."""

    dim: int
    stiffness: np.ndarray          # (N,) diagonal entries n^2 pi^2
    density_matrix: np.ndarray     # (N, N) complex symmetric
    model: DensityModel
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def sigma_alpha_derivative(self) -> np.ndarray:
        """d(density_matrix)/d(alpha) for the parametric polynomial models."""
        N = self.dim
        if self.model.kind == "linear_pt":
            return 1j * moment_matrix_x(N)
        if self.model.kind == "quadratic_pt":
            return 2j * moment_matrix_x(N) - 2.0 * self.model.alpha * moment_matrix_x2(N)
        raise NotImplementedError(
            f"analytic alpha-derivative not available for {self.model.kind}"
        )


def assemble(model: DensityModel, N: int, tol: float = QUADRATURE_TOL) -> PencilMatrices:
    """Build the pencil matrices for a density model at truncation N."""
    if N < 1:
        raise ValueError("truncation N must be a positive integer")
    if model.kind == "uniform":
        S = np.eye(N, dtype=complex)
    elif model.kind == "linear_pt":
        S = np.eye(N, dtype=complex) + 1j * model.alpha * moment_matrix_x(N)
    elif model.kind == "quadratic_pt":
        S = (
            np.eye(N, dtype=complex)
            + 2j * model.alpha * moment_matrix_x(N)
            - model.alpha**2 * moment_matrix_x2(N)
        )
    else:
        S = np.empty((N, N), dtype=complex)
        for m in range(1, N + 1):
            for n in range(m, N + 1):
                val = adaptive_gauss_legendre(
                    lambda x: sine_basis(m, x) * evaluate(model, x) * sine_basis(n, x),
                    -0.5,
                    0.5,
                    tol=tol,
                )
                S[m - 1, n - 1] = S[n - 1, m - 1] = val
    return PencilMatrices(N, stiffness_diagonal(N), S, model)


# -- log-scaled secular determinant -----------------------------------------


@dataclass(frozen=True)
class LogScaledValue:
    """A complex number w = phase * exp(log_magnitude), |phase| = 1.

    Keeps determinants representable far beyond float range; .value
    materializes the number (inf on overflow, 0 on underflow).
    """

    log_magnitude: float
    phase: complex

    @property
    def value(self) -> complex:
        if self.log_magnitude == -np.inf:
            return 0.0 + 0.0j
        if self.log_magnitude > 700.0:
            return complex(np.inf * self.phase.real, np.inf * self.phase.imag)
        return self.phase * np.exp(self.log_magnitude)

    def scaled_by(self, log_shift: float) -> complex:
        """phase * exp(log_magnitude - log_shift)."""
        return self.phase * np.exp(self.log_magnitude - log_shift)

    def __mul__(self, other: complex) -> "LogScaledValue":
        mag = abs(other)
        if mag == 0.0:
            return LogScaledValue(-np.inf, 1.0 + 0.0j)
        return LogScaledValue(self.log_magnitude + np.log(mag), self.phase * other / mag)


def _lu_logdet(A: np.ndarray):
    lu, piv = sla.lu_factor(A, check_finite=False)
    diag = np.diag(lu)
    absd = np.abs(diag)
    if np.any(absd == 0.0):
        return LogScaledValue(-np.inf, 1.0 + 0.0j), (lu, piv)
    logmag = float(np.sum(np.log(absd)))
    phase = complex(np.prod(diag / absd))
    nswap = int(np.sum(piv != np.arange(len(piv))))
    if nswap % 2:
        phase = -phase
    return LogScaledValue(logmag, phase), (lu, piv)


def secular_determinant(pencil: PencilMatrices, E: complex) -> LogScaledValue:
    """F(E) = det(D - E S) in log-magnitude form."""
    A = np.diag(pencil.stiffness).astype(complex) - E * pencil.density_matrix
    det, _ = _lu_logdet(A)
    return det


def secular_derivative(pencil: PencilMatrices, E: complex) -> LogScaledValue:
    """dF/dE = -F trace[(D - E S)^{-1} S], same log-scaled representation."""
    A = np.diag(pencil.stiffness).astype(complex) - E * pencil.density_matrix
    det, lup = _lu_logdet(A)
    if det.log_magnitude == -np.inf:
        raise SingularPencilError("pencil is singular at E; use finite differences of F")
    tr = complex(np.trace(sla.lu_solve(lup, pencil.density_matrix, check_finite=False)))
    return det * (-tr)


def secular_pair(pencil: PencilMatrices, E: complex):
    """(F, dF/dE) sharing one LU factorization."""
    A = np.diag(pencil.stiffness).astype(complex) - E * pencil.density_matrix
    det, lup = _lu_logdet(A)
    if det.log_magnitude == -np.inf:
        raise SingularPencilError("pencil is singular at E")
    tr = complex(np.trace(sla.lu_solve(lup, pencil.density_matrix, check_finite=False)))
    return det, det * (-tr)
