"""Symmetric-matrix helpers: eigendecompositions, SPD powers, trace minimization.

Everything downstream (Mahalanobis distances, whitening, the closed-form
family fits) funnels through these few routines, so they pin down the
numerical conventions once: eigenvalues are reported in descending order,
eigenvector signs are normalized, and positive definiteness is judged
against a single relative floor.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, SingularMatrixError

# Relative positivity floor: an SPD matrix counts as singular once its
# smallest eigenvalue falls to 1e-10 times the mean of its spectrum.
EIGENVALUE_FLOOR_SCALE = 1e-10

# Sign convention threshold: the first eigenvector component with magnitude
# above this is made positive.
_SIGN_EPS = 1e-12


class EigenDecomposition(NamedTuple):
    """Spectral factorization M = vectors @ diag(values) @ vectors.T."""

    values: np.ndarray   # eigenvalues, descending
    vectors: np.ndarray  # orthonormal columns, column i pairs with values[i]


def symmetrize(matrix) -> np.ndarray:
    """Return ``(M + M.T) / 2`` as a float array, validating the shape."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise InvalidInputError("matrix entries must be finite")
    return (m + m.T) / 2.0


def eigenvalue_floor(matrix: np.ndarray) -> float:
    """Smallest eigenvalue still treated as strictly positive for ``matrix``."""
    n = matrix.shape[0]
    return EIGENVALUE_FLOOR_SCALE * (float(np.trace(matrix)) / n)


def sym_eigen(matrix) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix with deterministic output.

    The input is symmetrized first, eigenvalues come back in descending
    order, and each eigenvector is flipped if needed so that its first
    component of magnitude above 1e-12 is positive.  Degenerate subspaces
    still admit many valid bases, but for simple spectra the result is a
    reproducible function of the input.
    """
    m = symmetrize(matrix)
    raw_values, raw_vectors = np.linalg.eigh(m)
    # eigh returns ascending eigenvalues; flip to descending.
    values = raw_values[::-1].copy()
    vectors = raw_vectors[:, ::-1].copy()
    for i in range(m.shape[0]):
        column = vectors[:, i]
        lead = np.flatnonzero(np.abs(column) > _SIGN_EPS)
        if lead.size and column[lead[0]] < 0.0:
            vectors[:, i] = -column
    return EigenDecomposition(values, vectors)


def log_det_spd(matrix) -> float:
    """``ln det M`` for symmetric positive definite ``M``.

    Raises SingularMatrixError when the smallest eigenvalue does not clear
    the positivity floor.
    """
    m = symmetrize(matrix)
    values = sym_eigen(m).values
    smallest = float(values[-1])
    if smallest <= eigenvalue_floor(m):
        raise SingularMatrixError(
            f"matrix is singular at working precision (smallest eigenvalue {smallest:.3e})",
            smallest_eigenvalue=smallest,
        )
    return float(np.log(values).sum())


def spd_power(matrix, exponent: float) -> np.ndarray:
    """Symmetric power ``M**t`` via the spectral map ``U diag(lam**t) U.T``.

    Negative exponents require the matrix to be positive definite above the
    eigenvalue floor; SingularMatrixError is raised otherwise.  Nonnegative
    exponents tolerate a semidefinite input by clamping stray negative
    eigenvalues to zero.
    """
    m = symmetrize(matrix)
    eig = sym_eigen(m)
    smallest = float(eig.values[-1])
    if exponent < 0.0 and smallest <= eigenvalue_floor(m):
        raise SingularMatrixError(
            f"cannot raise a singular matrix to power {exponent} "
            f"(smallest eigenvalue {smallest:.3e})",
            smallest_eigenvalue=smallest,
        )
    if exponent < 0.0:
        powered = eig.values ** exponent
    else:
        powered = np.clip(eig.values, 0.0, None) ** exponent
    return symmetrize((eig.vectors * powered) @ eig.vectors.T)


def min_trace_assignment(target_spectrum, matrix) -> float:
    """Minimum of ``tr(A @ B)`` over symmetric A with a prescribed spectrum.

    ``target_spectrum`` lists the eigenvalues A must have, in ascending
    order.  The minimum pairs them against the eigenvalues of B taken in
    descending order:

        min tr(A B) = sum_i  lam_i^ascending * beta_i^descending

    and is attained when A and B share eigenvectors with that pairing.
    B must be symmetric nonnegative definite.
    """
    lam = np.asarray(target_spectrum, dtype=float).reshape(-1)
    if lam.size == 0 or not np.isfinite(lam).all():
        raise InvalidInputError("target spectrum must be a nonempty finite vector")
    if np.any(np.diff(lam) < 0.0):
        raise InvalidInputError("target spectrum must be in ascending order")
    if np.any(lam < 0.0):
        raise InvalidInputError("target spectrum must be nonnegative")
    b = symmetrize(matrix)
    if b.shape[0] != lam.size:
        raise InvalidInputError(
            f"spectrum of length {lam.size} does not match a {b.shape[0]}x{b.shape[0]} matrix"
        )
    beta = sym_eigen(b).values
    if float(beta[-1]) < -1e-10:
        raise InvalidInputError(
            f"matrix must be nonnegative definite (smallest eigenvalue {beta[-1]:.3e})"
        )
    beta = np.clip(beta, 0.0, None)
    # lam ascending, beta descending: the anti-aligned pairing.
    return float(lam @ beta)
