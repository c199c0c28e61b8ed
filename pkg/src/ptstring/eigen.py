"""Eigenvalues and eigenfunctions of the truncated pencil D c = E S c.

For PT-symmetric densities the truncated secular polynomial has real
coefficients on the real axis, so the computed spectrum is closed under
complex conjugation (up to solver noise): each eigenvalue is tagged either
real or as one member of a conjugate pair.

Eigenfunctions use the bilinear (non-conjugated) normalization
int psi^2 dx = sum_m c_m^2 = 1, the natural choice for complex-symmetric
pencils; the leftover sign is fixed by making Re psi > 0 at the point of
maximum modulus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .density import DensityModel
from .discretize import PencilMatrices, sine_basis

REAL = "real"
PAIR_LOWER = "pair_lower"   # Im E < 0 member
PAIR_UPPER = "pair_upper"   # Im E > 0 member

DEFAULT_REALITY_TOLERANCE = 1e-9


class IllConditionedDensityError(np.linalg.LinAlgError):
    """Density matrix too ill-conditioned for the inverse-reduction path."""


@dataclass
class ComplexSpectrum:
    """Ordered spectrum with per-eigenvalue reality classification.

    partner[i] is the index of the conjugate companion for pair members and
    -1 for real eigenvalues.
    """

    eigenvalues: np.ndarray
    classification: list
    partner: np.ndarray
    truncation: int
    model: DensityModel
    reality_tolerance: float

    def real_eigenvalues(self) -> np.ndarray:
        mask = [t == REAL for t in self.classification]
        return self.eigenvalues[mask]

    def count_real(self, first: int | None = None) -> int:
        tags = self.classification if first is None else self.classification[:first]
        return sum(t == REAL for t in tags)


def _classify(w: np.ndarray, tol: float):
    """Tag eigenvalues real / pair members by greedy conjugate matching."""
    n = len(w)
    tags = [REAL] * n
    partner = np.full(n, -1, dtype=int)
    complex_idx = [i for i in range(n) if abs(w[i].imag) > tol * (1.0 + abs(w[i]))]
    unmatched = set(complex_idx)
    for i in complex_idx:
        if i not in unmatched:
            continue
        others = [j for j in unmatched if j != i]
        if not others:
            tags[i] = PAIR_LOWER if w[i].imag < 0 else PAIR_UPPER
            continue
        dists = [abs(w[j] - np.conj(w[i])) for j in others]
        j = others[int(np.argmin(dists))]
        unmatched.discard(i)
        unmatched.discard(j)
        lo, hi = (i, j) if w[i].imag <= w[j].imag else (j, i)
        tags[lo], tags[hi] = PAIR_LOWER, PAIR_UPPER
        partner[lo], partner[hi] = hi, lo
    return tags, partner


def _solve_modes(pencil: PencilMatrices, method: str):
    """Eigendecomposition of the pencil, cached on the pencil object."""
    key = ("modes", method)
    if key in pencil._cache:
        return pencil._cache[key]
    D = np.diag(pencil.stiffness).astype(complex)
    if method == "generalized":
        w, V = sla.eig(D, pencil.density_matrix, check_finite=False)
    elif method == "inverse":
        cond = np.linalg.cond(pencil.density_matrix, 1)
        if cond >= 1e12:
            raise IllConditionedDensityError(
                f"cond(Sigma) ~ {cond:.2e} >= 1e12; use method='generalized'"
            )
        A = sla.solve(pencil.density_matrix, D, check_finite=False)
        w, V = sla.eig(A, check_finite=False)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    order = np.lexsort((w.imag, w.real))
    w, V = w[order], V[:, order]
    pencil._cache[key] = (w, V)
    return w, V


def spectrum(
    pencil: PencilMatrices,
    reality_tolerance: float = DEFAULT_REALITY_TOLERANCE,
    method: str = "generalized",
) -> ComplexSpectrum:
    """All N eigenvalues, ordered by (Re E, Im E), with reality tags."""
    if not 1e-12 <= reality_tolerance <= 1e-6:
        raise ValueError("reality_tolerance must lie in [1e-12, 1e-6]")
    w, _ = _solve_modes(pencil, method)
    tags, partner = _classify(w, reality_tolerance)
    return ComplexSpectrum(
        w.copy(), tags, partner, pencil.dim, pencil.model, reality_tolerance
    )


def _normalized_coefficients(pencil: PencilMatrices, method: str):
    key = ("coeff", method)
    if key in pencil._cache:
        return pencil._cache[key]
    w, V = _solve_modes(pencil, method)
    N = pencil.dim
    xs = np.linspace(-0.5, 0.5, 201)
    U = sine_basis(np.arange(1, N + 1), xs)
    C = np.empty_like(V)
    for j in range(N):
        c = V[:, j]
        nrm = np.sqrt(np.sum(c * c) + 0j)
        if abs(nrm) < 1e-300:
            C[:, j] = c
            continue
        c = c / nrm
        vals = c @ U
        k = int(np.argmax(np.abs(vals)))
        v = vals[k]
        if v.real < 0 or (v.real == 0 and v.imag < 0):
            c = -c
        C[:, j] = c
    pencil._cache[key] = (w, C)
    return w, C


def eigenfunction(pencil: PencilMatrices, index: int, x, method: str = "generalized"):
    """psi_index(x) = sum_m c_m u_m(x); index is 1-based in spectral order."""
    if not 1 <= index <= pencil.dim:
        raise IndexError(f"mode index {index} out of range 1..{pencil.dim}")
    _, C = _normalized_coefficients(pencil, method)
    c = C[:, index - 1]
    vals = c @ sine_basis(np.arange(1, pencil.dim + 1), x)
    if np.ndim(x) == 0:
        return complex(vals)
    return vals


def mode_coefficients(pencil: PencilMatrices, index: int, method: str = "generalized"):
    """Basis coefficients of the normalized mode (1-based index)."""
    if not 1 <= index <= pencil.dim:
        raise IndexError(f"mode index {index} out of range 1..{pencil.dim}")
    _, C = _normalized_coefficients(pencil, method)
    return C[:, index - 1].copy()


def pencil_residual(pencil: PencilMatrices, index: int, method: str = "generalized") -> float:
    """Relative solver residual ||D c - E S c|| / ||E S c|| for one mode."""
    w, C = _normalized_coefficients(pencil, method)
    c = C[:, index - 1]
    rhs = w[index - 1] * (pencil.density_matrix @ c)
    r = pencil.stiffness * c - rhs
    return float(np.linalg.norm(r) / np.linalg.norm(rhs))


def truncation_residual(pencil: PencilMatrices, index: int, assemble_fn=None) -> float:
    """Basis-truncation residual of -psi'' = E Sigma psi, measured at 2N.

    Embeds the N-term mode into a 2N pencil; rows beyond N quantify the
    spectral content of Sigma psi that the truncation discards.
    """
    from .discretize import assemble

    w, C = _normalized_coefficients(pencil, "generalized")
    N = pencil.dim
    big = (assemble_fn or assemble)(pencil.model, 2 * N)
    c2 = np.zeros(2 * N, dtype=complex)
    c2[:N] = C[:, index - 1]
    rhs = w[index - 1] * (big.density_matrix @ c2)
    r = big.stiffness * c2 - rhs
    return float(np.linalg.norm(r) / np.linalg.norm(rhs))
