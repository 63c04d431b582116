"""Dataset moments, Gaussian cross-entropy, and the match score.

For a dataset Y with mean m_Y and covariance S_Y, the cross-entropy of Y
against the Gaussian density Nor(m, S) has the closed form

    Hx(Y || Nor(m, S)) = N/2 ln(2 pi) + 1/2 ||m - m_Y||_S^2
                         + 1/2 tr(S^-1 S_Y) + 1/2 ln det S

where ||v||_S^2 = v' S^-1 v is the squared Mahalanobis norm.  Subtracting
the entropy of the moment-matched Gaussian gives the match score

    M(Y || Nor(m, S)) = Hx(Y || Nor(m, S)) - Hx(Y || Nor(m_Y, S_Y))
                      = 1/2 ( ||m - m_Y||_S^2 + tr(S^-1 S_Y)
                              - ln det(S^-1 S_Y) - N )

which is nonnegative and zero exactly when (m, S) = (m_Y, S_Y).  The score
depends on the data only through its first two moments, so the routines
here take a ``Moments`` summary rather than raw points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, SingularMatrixError
from .linalg import eigenvalue_floor, sym_eigen, symmetrize

LOG_TWO_PI = math.log(2.0 * math.pi)

# Moments accept covariance estimates that are "negative by rounding only".
_PSD_SLACK = 1e-10


def as_point_set(points) -> np.ndarray:
    """Validate and return a dataset as an (n, dim) float array.

    One-dimensional input is treated as n scalar observations.  At least
    two points are required; entries must be finite.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] == 0:
        raise InvalidInputError(f"expected an (n, dim) array of points, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise InvalidInputError("points must be finite")
    if pts.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 points, got {pts.shape[0]}")
    return pts


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Moments:
    """Mean vector and covariance matrix summarizing a dataset."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.size == 0 or not np.isfinite(mean).all():
            raise InvalidInputError("mean must be a nonempty finite vector")
        cov = symmetrize(self.cov)
        if cov.shape[0] != mean.size:
            raise InvalidInputError(
                f"covariance shape {cov.shape} does not match mean of length {mean.size}"
            )
        values = np.linalg.eigvalsh(cov)
        slack = _PSD_SLACK * max(1.0, float(values[-1]))
        if float(values[0]) < -slack:
            raise InvalidInputError(
                f"covariance must be nonnegative definite (eigenvalue {values[0]:.3e})"
            )
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(cov))

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class GaussianModel:
    """Parameters (mean, covariance) of a Gaussian density."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.size == 0 or not np.isfinite(mean).all():
            raise InvalidInputError("mean must be a nonempty finite vector")
        cov = symmetrize(self.cov)
        if cov.shape[0] != mean.size:
            raise InvalidInputError(
                f"covariance shape {cov.shape} does not match mean of length {mean.size}"
            )
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(cov))

    @property
    def dim(self) -> int:
        return self.mean.size


def estimate_moments(points) -> Moments:
    """Sample mean and covariance of a dataset.

    The covariance uses the 1/n divisor: it is the second central moment of
    the empirical distribution, which is what the cross-entropy formulas
    integrate against.
    """
    pts = as_point_set(points)
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = symmetrize(centered.T @ centered / pts.shape[0])
    return Moments(mean=mean, cov=cov)


def _precision_and_log_det(cov: np.ndarray):
    """Inverse and log-determinant of an SPD matrix from one eigendecomposition."""
    eig = sym_eigen(cov)
    smallest = float(eig.values[-1])
    if smallest <= eigenvalue_floor(cov):
        raise SingularMatrixError(
            f"covariance is singular at working precision (smallest eigenvalue {smallest:.3e})",
            smallest_eigenvalue=smallest,
        )
    precision = symmetrize((eig.vectors / eig.values) @ eig.vectors.T)
    return precision, float(np.log(eig.values).sum())


def mahalanobis_sq(vector, cov) -> float:
    """Squared Mahalanobis norm ``v' inv(S) v`` of a vector under covariance S."""
    v = np.asarray(vector, dtype=float).reshape(-1)
    if not np.isfinite(v).all():
        raise InvalidInputError("vector must be finite")
    s = symmetrize(cov)
    if s.shape[0] != v.size:
        raise InvalidInputError(
            f"vector of length {v.size} does not match a {s.shape[0]}x{s.shape[0]} covariance"
        )
    precision, _ = _precision_and_log_det(s)
    return float(v @ precision @ v)


def cross_entropy(moments: Moments, model: GaussianModel) -> float:
    """Cross-entropy of the data distribution against a Gaussian density.

    Closed form in the dataset moments; equals the mean negative
    log-density of the data points under the model.
    """
    _check_same_dim(moments, model)
    n = moments.dim
    precision, log_det = _precision_and_log_det(model.cov)
    diff = model.mean - moments.mean
    maha = float(diff @ precision @ diff)
    trace_term = float(np.sum(precision * moments.cov))
    return 0.5 * (n * LOG_TWO_PI + maha + trace_term + log_det)


def self_cross_entropy(moments: Moments) -> float:
    """Cross-entropy of the data against its own moment-matched Gaussian.

    Equals the differential entropy N/2 ln(2 pi e) + 1/2 ln det S_Y and is
    the infimum of ``cross_entropy`` over all Gaussian models.
    """
    eig = sym_eigen(moments.cov)
    smallest = float(eig.values[-1])
    if smallest <= eigenvalue_floor(moments.cov):
        raise SingularMatrixError(
            f"covariance is singular at working precision (smallest eigenvalue {smallest:.3e})",
            smallest_eigenvalue=smallest,
        )
    n = moments.dim
    return 0.5 * (n * (LOG_TWO_PI + 1.0) + float(np.log(eig.values).sum()))


def match_score(moments: Moments, model: GaussianModel) -> float:
    """Excess cross-entropy of ``model`` over the best Gaussian for the data.

    M = 1/2 ( ||m - m_Y||_S^2 + tr(S^-1 S_Y) - ln det(S^-1 S_Y) - N ).

    Nonnegative; zero exactly at the moment-matched model.  Invariant under
    applying one affine change of variables to both the data and the model.
    """
    _check_same_dim(moments, model)
    n = moments.dim
    precision, model_log_det = _precision_and_log_det(model.cov)
    data_eig = sym_eigen(moments.cov)
    data_smallest = float(data_eig.values[-1])
    if data_smallest <= eigenvalue_floor(moments.cov):
        raise SingularMatrixError(
            f"data covariance is singular at working precision "
            f"(smallest eigenvalue {data_smallest:.3e})",
            smallest_eigenvalue=data_smallest,
        )
    data_log_det = float(np.log(data_eig.values).sum())
    diff = model.mean - moments.mean
    maha = float(diff @ precision @ diff)
    trace_term = float(np.sum(precision * moments.cov))
    return 0.5 * (maha + trace_term - (data_log_det - model_log_det) - n)


def _check_same_dim(moments: Moments, model: GaussianModel) -> None:
    if moments.dim != model.dim:
        raise InvalidInputError(
            f"data dimension {moments.dim} does not match model dimension {model.dim}"
        )
