"""Grid collocation of the symmetrized operator (1/sqrt(Sigma)) (-d2/dx2) (1/sqrt(Sigma)).

This is the package's independent cross-check on the sine-basis pencil: the
two discretizations share no code beyond the density evaluation, so
agreement of their spectra validates both.

The second-derivative matrix is spectral: on the uniform interior grid
x_j = -1/2 + j/(M+1) the DST-I diagonalizes the Dirichlet Laplacian exactly
for the first M sine modes,

    K = (2/(M+1)) F diag(m^2 pi^2) F,   F_jm = sin(j m pi / (M+1)),

so for the uniform density the discrete spectrum is n^2 pi^2 exactly and a
few hundred points reach the accuracy elsewhere that low-order differences
only reach with thousands.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .density import DensityModel, evaluate
from .eigen import DEFAULT_REALITY_TOLERANCE, ComplexSpectrum, _classify


class DensityZeroError(ArithmeticError):
    """|Sigma| below 1e-12 at a collocation node."""


class BranchCutWarning(UserWarning):
    """arg Sigma crosses the negative real axis along the grid."""


@dataclass
class CollocationGrid:
    """Uniform-grid discretization of the symmetrized string operator."""

    points: np.ndarray            # (M,) interior nodes
    operator_matrix: np.ndarray   # (M, M) complex
    model: DensityModel
    branch_warning: bool = False


def second_derivative_matrix(M: int) -> np.ndarray:
    """Dense spectral Dirichlet (-d2/dx2) matrix on M interior nodes."""
    j = np.arange(1, M + 1)
    F = np.sin(np.outer(j, j) * np.pi / (M + 1.0))
    lam = (j * np.pi) ** 2
    return (2.0 / (M + 1.0)) * (F * lam) @ F


def build(model: DensityModel, M: int) -> CollocationGrid:
    """Assemble S K S with S = diag(1/sqrt(Sigma(x_j))), principal branch."""
    if M < 8:
        raise ValueError("collocation grid must have M >= 8 points")
    j = np.arange(1, M + 1)
    x = -0.5 + j / (M + 1.0)
    sig = evaluate(model, x)
    if np.any(np.abs(sig) < 1e-12):
        raise DensityZeroError("density vanishes at a collocation node")
    # detect a branch-cut crossing: arg Sigma jumping by ~2 pi between nodes
    darg = np.diff(np.angle(sig))
    crossed = bool(np.any(np.abs(darg) > np.pi))
    if crossed:
        warnings.warn(
            "principal sqrt(Sigma) is discontinuous along the grid", BranchCutWarning
        )
    s = 1.0 / np.sqrt(sig)
    K = second_derivative_matrix(M)
    A = s[:, None] * K * s[None, :]
    return CollocationGrid(x, A, model, branch_warning=crossed)


def spectrum_collocation(
    grid: CollocationGrid,
    count: int,
    reality_tolerance: float = DEFAULT_REALITY_TOLERANCE,
    order_by: str = "auto",
) -> ComplexSpectrum:
    """Lowest `count` eigenvalues of the collocation operator.

    Ordering follows the model: by real part in general, by modulus for the
    quadratic density (whose indefinite density matrix pushes truncation
    artifacts to large negative real parts in any discretization, while the
    physical low modes have the smallest |E|).
    """
    M = len(grid.points)
    if count > M:
        raise ValueError("count exceeds the grid size")
    if order_by == "auto":
        order_by = "abs" if grid.model.kind == "quadratic_pt" else "real"
    w = np.linalg.eigvals(grid.operator_matrix)
    if order_by == "abs":
        w = w[np.argsort(np.abs(w))][:count]
        w = w[np.lexsort((w.imag, w.real))]
    else:
        w = w[np.lexsort((w.imag, w.real))][:count]
    tags, partner = _classify(w, reality_tolerance)
    return ComplexSpectrum(w, tags, partner, M, grid.model, reality_tolerance)
