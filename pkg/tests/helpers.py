"""Shared random-object builders for the test suite. All seeded, all numpy."""

import numpy as np


def random_orthogonal(rng, n):
    """Haar-ish orthogonal matrix from the QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_spd(rng, n, spread=3.0):
    """SPD matrix with eigenvalues log-uniform in about [1/spread, spread]."""
    q = random_orthogonal(rng, n)
    values = np.exp(rng.uniform(-np.log(spread), np.log(spread), n))
    return (q * values) @ q.T


def random_moments(rng, n, spread=3.0):
    from gaussmatch import Moments

    return Moments(mean=rng.normal(0.0, 2.0, n), cov=random_spd(rng, n, spread))


def random_dataset(rng, dim, count):
    """Gaussian-ish sample with a well-conditioned covariance."""
    cov = random_spd(rng, dim, spread=2.5)
    chol = np.linalg.cholesky(cov)
    return rng.normal(0.0, 2.0, dim) + rng.standard_normal((count, dim)) @ chol.T
