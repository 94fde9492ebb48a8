"""Dense complex linear algebra and entropy functionals.

All entropies are in bits (base-2 logarithms) and use the convention
0 log 0 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NumericalInconsistencyError,
    OutOfRangeError,
    ValidationError,
)

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9
# Eigenvalues below SUPPORT_CUTOFF*(largest eigenvalue) count as zero; a state
# carrying more than SUPPORT_LEAK_TOL weight on the other state's numerical
# kernel has disjoint support and infinite relative entropy.
SUPPORT_CUTOFF = 1e-12
SUPPORT_LEAK_TOL = 1e-9
NEGATIVE_FLOOR = 1e-9


def as_complex_matrix(entries) -> np.ndarray:
    """Coerce to a dense square complex matrix, rejecting NaN/Inf entries."""
    mat = np.asarray(entries, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {mat.shape}")
    if mat.shape[0] == 0:
        raise ValidationError("matrix must have positive dimension")
    if not (np.all(np.isfinite(mat.real)) and np.all(np.isfinite(mat.imag))):
        raise ValidationError("matrix entries must be finite")
    return mat


def matrix_of(state) -> np.ndarray:
    """Unwrap a DensityMatrix-like object (anything with .matrix) to its array."""
    return np.asarray(getattr(state, "matrix", state))


def max_abs(array) -> float:
    return float(np.max(np.abs(array)))


def hermiticity_defect(matrix: np.ndarray) -> float:
    return max_abs(matrix - matrix.conj().T)


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are real and ascending; eigenvectors is unitary with the
    matching eigenvector in each column.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64)
        vecs = np.asarray(self.eigenvectors, dtype=np.complex128)
        if np.any(np.diff(vals) < 0):
            raise ValidationError("eigenvalues must be ascending")
        gram = vecs.conj().T @ vecs
        defect = max_abs(gram - np.eye(vecs.shape[0]))
        if defect > UNITARITY_TOL:
            raise ValidationError(
                f"eigenvector matrix is not unitary (defect {defect:.3e})"
            )
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)


def hermitian_eig(matrix, hermiticity_tol: float = HERMITICITY_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix with a reconstruction check."""
    mat = as_complex_matrix(matrix_of(matrix))
    defect = hermiticity_defect(mat)
    if defect > hermiticity_tol:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |M - M^dag| = {defect:.3e} "
            f"exceeds {hermiticity_tol:.3e}"
        )
    # Decompose the Hermitian part; exact for Hermitian input, and projects
    # out dirt the caller chose to tolerate.
    herm = (mat + mat.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(herm)
    spectrum = Spectrum(vals, vecs)
    residual = max_abs((vecs * vals) @ vecs.conj().T - herm)
    if residual > RECONSTRUCTION_TOL * max(1.0, max_abs(herm)):
        raise NumericalInconsistencyError(
            f"eigendecomposition reconstruction residual {residual:.3e}"
        )
    return spectrum


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor owns the most significant index."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def entropy_bits(probabilities) -> float:
    """Shannon entropy of a (sub)distribution in bits, ignoring p <= 0."""
    p = np.asarray(probabilities, dtype=np.float64)
    p = p[p > 0.0]
    if p.size == 0:
        return 0.0
    value = float(-np.sum(p * np.log2(p)))
    if value < 0.0:
        if value < -NEGATIVE_FLOOR:
            raise NumericalInconsistencyError(f"entropy came out {value:.3e}")
        value = 0.0
    return value + 0.0  # normalizes -0.0


def von_neumann_entropy(rho) -> float:
    """Entropy of a density matrix in bits: -sum(lambda log2 lambda)."""
    mat = as_complex_matrix(matrix_of(rho))
    return entropy_bits(np.linalg.eigvalsh(mat))


def relative_entropy(
    rho,
    sigma,
    *,
    support_cutoff: float = SUPPORT_CUTOFF,
    leak_tol: float = SUPPORT_LEAK_TOL,
) -> float:
    """Tr rho (log2 rho - log2 sigma), or +inf on support violation.

    Eigenvalues below support_cutoff times the largest one are treated as
    exact zeros; rho placing more than leak_tol weight on sigma's numerical
    kernel makes the divergence infinite.
    """
    rmat = as_complex_matrix(matrix_of(rho))
    smat = as_complex_matrix(matrix_of(sigma))
    if rmat.shape != smat.shape:
        raise DimensionMismatchError(
            f"state dimensions differ: {rmat.shape[0]} vs {smat.shape[0]}"
        )
    svals, svecs = np.linalg.eigh(smat)
    cutoff = support_cutoff * max(float(svals[-1]), 0.0)
    support = svals > cutoff
    weights = np.real(np.einsum("ij,jk,ki->i", svecs.conj().T, rmat, svecs))
    if float(weights[~support].sum()) > leak_tol:
        return math.inf
    rvals = np.linalg.eigvalsh(rmat)
    rcutoff = support_cutoff * max(float(rvals[-1]), 0.0)
    rpos = rvals[rvals > rcutoff]
    value = float(np.sum(rpos * np.log2(rpos)))
    value -= float(np.sum(weights[support] * np.log2(svals[support])))
    if value < 0.0:
        if value < -NEGATIVE_FLOOR:
            raise NumericalInconsistencyError(
                f"relative entropy came out {value:.3e}"
            )
        value = 0.0
    return value


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2 (1-p) with H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRangeError(f"probability must be in [0, 1], got {p}")
    return entropy_bits([p, 1.0 - p])
