"""Derivative-free verification oracle for the closed-form family fits.

The closed forms in :mod:`gaussmatch.families` claim to minimize the
cross-entropy of a dataset against a Gaussian within a constrained family.
This module re-derives those minima numerically: each family gets an
unconstrained parameterization whose image is exactly the family's
positive-definite interior, and a seeded Nelder-Mead search minimizes the
empirical cross-entropy (mean negative log-density) over it.  Agreement
between the two routes is the strongest check the package offers, and the
``verify`` CLI subcommand exposes it directly.

The oracle evaluates the objective from the raw points, not from the
closed-form moment expressions, so the two routes share no algebra beyond
the density itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError, OracleConvergenceError, SingularMatrixError
from .families import FAMILY_ORDER, Family, FamilySpec, FitResult, fit
from .gaussians import LOG_TWO_PI, GaussianModel, as_point_set, estimate_moments
from .linalg import EIGENVALUE_FLOOR_SCALE

# Nelder-Mead is reliable only in modest dimension; a full covariance in
# dimension 8 already means 44 free parameters.
MAX_ORACLE_DIM = 8

# Agreement thresholds for oracle-vs-closed-form comparisons.
ORACLE_ABS_TOL = 1e-4
ORACLE_MARGIN = 1e-6


@dataclass(frozen=True)
class OracleConfig:
    """Settings for the Nelder-Mead verification runs."""

    max_iterations: int = 5000
    rel_tolerance: float = 1e-10
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be positive")
        if not (self.rel_tolerance > 0.0):
            raise InvalidInputError("rel_tolerance must be positive")
        if self.restarts < 1:
            raise InvalidInputError("restarts must be at least 1")


def _ce_terms(pts: np.ndarray, mean: np.ndarray, cov: np.ndarray):
    """Empirical cross-entropy value, or None when cov is unusable."""
    try:
        values, vectors = np.linalg.eigh(cov)
    except np.linalg.LinAlgError:
        return None, None
    smallest = float(values[0])
    floor = EIGENVALUE_FLOOR_SCALE * (float(np.trace(cov)) / cov.shape[0])
    if not np.isfinite(values).all() or smallest <= floor:
        return None, smallest
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        z = ((pts - mean) @ vectors) / np.sqrt(values)
        quad = float(np.einsum("ij,ij->", z, z)) / pts.shape[0]
        n = pts.shape[1]
        value = 0.5 * (n * LOG_TWO_PI + float(np.log(values).sum()) + quad)
    return value, smallest


def empirical_cross_entropy(points, model: GaussianModel) -> float:
    """Mean negative log-density of the points under the model.

    Agrees with the closed-form ``cross_entropy`` of the dataset moments;
    the two are computed along different paths and are compared in the
    test suite.
    """
    pts = as_point_set(points)
    if pts.shape[1] != model.dim:
        raise InvalidInputError(
            f"points of dimension {pts.shape[1]} do not match model dimension {model.dim}"
        )
    value, smallest = _ce_terms(pts, model.mean, model.cov)
    if value is None or not np.isfinite(value):
        raise SingularMatrixError(
            "model covariance is singular at working precision",
            smallest_eigenvalue=smallest,
        )
    return float(value)


def _param_count(kind: Family, n: int) -> int:
    tril = n * (n - 1) // 2
    return {
        Family.FULL: 2 * n + tril,
        Family.FIXED_MEAN: n + tril,
        Family.ISOTROPIC: n + 1,
        Family.FIXED_MEAN_ISOTROPIC: 1,
        Family.DIAGONAL: 2 * n,
        Family.FIXED_MEAN_DIAGONAL: n,
    }[kind]


def _mean_cov_from_params(spec: FamilySpec, n: int, params: np.ndarray):
    """Map an unconstrained parameter vector to (mean, cov) for the family.

    Scale parameters live on the log axis and covariances are assembled as
    L @ L.T with a positive diagonal, so every parameter vector maps to a
    symmetric positive definite covariance inside the family.
    """
    kind = spec.kind
    with np.errstate(over="ignore", invalid="ignore"):
        if kind is Family.FULL or kind is Family.FIXED_MEAN:
            if kind is Family.FULL:
                mean, rest = params[:n], params[n:]
            else:
                mean, rest = spec.fixed_mean, params
            lower = np.zeros((n, n))
            lower[np.diag_indices(n)] = np.exp(rest[:n])
            lower[np.tril_indices(n, -1)] = rest[n:]
            cov = lower @ lower.T
        elif kind is Family.ISOTROPIC or kind is Family.FIXED_MEAN_ISOTROPIC:
            if kind is Family.ISOTROPIC:
                mean, log_scale = params[:n], params[n]
            else:
                mean, log_scale = spec.fixed_mean, params[0]
            cov = math.exp(log_scale) * np.eye(n) if log_scale < 709.0 else np.full((n, n), np.inf)
        else:
            if kind is Family.DIAGONAL:
                mean, log_diag = params[:n], params[n:]
            else:
                mean, log_diag = spec.fixed_mean, params
            cov = np.diag(np.exp(log_diag))
    return np.asarray(mean, dtype=float), cov


def _initial_point(spec: FamilySpec, moments, n: int):
    """Starting parameter vector and a per-parameter perturbation scale."""
    kind = spec.kind
    scale = max(float(np.trace(moments.cov)) / n, 1e-12)
    log_scale = math.log(scale)
    mean_sigma = 0.35 * math.sqrt(scale)
    parts, sigmas = [], []
    if kind in (Family.FULL, Family.ISOTROPIC, Family.DIAGONAL):
        parts.append(np.asarray(moments.mean, dtype=float))
        sigmas.append(np.full(n, mean_sigma))
    if kind in (Family.FULL, Family.FIXED_MEAN):
        tril = n * (n - 1) // 2
        parts.append(np.full(n, 0.5 * log_scale))
        sigmas.append(np.full(n, 0.35))
        parts.append(np.zeros(tril))
        sigmas.append(np.full(tril, 0.35 * math.sqrt(scale)))
    elif kind in (Family.ISOTROPIC, Family.FIXED_MEAN_ISOTROPIC):
        parts.append(np.array([log_scale]))
        sigmas.append(np.array([0.35]))
    else:
        parts.append(np.full(n, log_scale))
        sigmas.append(np.full(n, 0.35))
    return np.concatenate(parts), np.concatenate(sigmas)


def _minimize_details(points, spec: FamilySpec, config: OracleConfig):
    """Run the restart schedule; return (best_x, best_fun, per-restart stats)."""
    pts = as_point_set(points)
    n = pts.shape[1]
    if n > MAX_ORACLE_DIM:
        raise InvalidInputError(
            f"oracle supports dimension <= {MAX_ORACLE_DIM}, got {n}"
        )
    if spec.fixed_mean is not None and spec.fixed_mean.size != n:
        raise InvalidInputError(
            f"fixed mean of length {spec.fixed_mean.size} does not match "
            f"data dimension {n}"
        )
    moments = estimate_moments(pts)

    def objective(params: np.ndarray) -> float:
        mean, cov = _mean_cov_from_params(spec, n, params)
        value, _ = _ce_terms(pts, mean, cov)
        if value is None or not np.isfinite(value):
            return np.inf
        return value

    base, sigma = _initial_point(spec, moments, n)
    f_base = objective(base)
    fatol = config.rel_tolerance * max(1.0, abs(f_base) if np.isfinite(f_base) else 1.0)
    step = 0.25 * sigma + 0.05 * np.abs(base)
    runs = []
    for r in range(config.restarts):
        rng = np.random.default_rng([config.seed & 0xFFFFFFFFFFFFFFFF, r])
        x0 = base if r == 0 else base + rng.normal(0.0, 1.0, base.size) * sigma
        simplex = np.vstack([x0, x0 + np.diag(step)])
        result = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": config.max_iterations,
                "maxfev": 10 * config.max_iterations,
                "initial_simplex": simplex,
                "xatol": 1e-6,
                "fatol": fatol,
                "adaptive": True,
            },
        )
        runs.append(
            {
                "x": np.asarray(result.x, dtype=float),
                "fun": float(result.fun),
                "iterations": int(result.nit),
                "evaluations": int(result.nfev),
                "converged": bool(result.success),
            }
        )
    converged = [run for run in runs if run["converged"]]
    pool = converged if converged else runs
    best = min(pool, key=lambda run: run["fun"])
    return best["x"], best["fun"], runs


def oracle_minimize(points, spec: FamilySpec, config: OracleConfig | None = None) -> FitResult:
    """Numerically minimize the empirical cross-entropy within a family.

    Runs ``config.restarts`` seeded Nelder-Mead searches from perturbed
    starting points and keeps the best converged run.  The returned match
    score is the best objective value minus the empirical cross-entropy of
    the moment-matched Gaussian, mirroring the closed-form definition.

    Raises OracleConvergenceError (carrying the best match value seen) when
    no restart converges within ``config.max_iterations``.
    """
    cfg = config if config is not None else OracleConfig()
    pts = as_point_set(points)
    best_x, best_fun, runs = _minimize_details(pts, spec, cfg)
    moments = estimate_moments(pts)
    baseline = empirical_cross_entropy(pts, GaussianModel(moments.mean, moments.cov))
    if not any(run["converged"] for run in runs):
        raise OracleConvergenceError(
            f"no restart converged within {cfg.max_iterations} iterations "
            f"for family {spec.kind.value!r}",
            best_value=float(best_fun - baseline),
        )
    mean, cov = _mean_cov_from_params(spec, pts.shape[1], best_x)
    model = GaussianModel(mean=mean, cov=cov)
    return FitResult(
        model=model,
        match=float(best_fun - baseline),
        cross_entropy=float(best_fun),
        family=spec,
    )


@dataclass(frozen=True)
class FamilyCheck:
    """Aggregate oracle-vs-closed-form agreement for one family."""

    family: Family
    trials: int
    max_abs_diff: float
    worst_margin: float
    passed: bool


def _verification_dataset(seed: int, index: int, dims) -> np.ndarray:
    """Seeded random dataset with a well-conditioned covariance."""
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index])
    dim = int(dims[index % len(dims)])
    n = int(rng.integers(20, 121))
    mean = rng.normal(0.0, 2.0, dim)
    a = rng.normal(0.0, 1.0, (dim, dim))
    cov = a @ a.T / dim + np.diag(rng.uniform(0.3, 1.0, dim))
    chol = np.linalg.cholesky(cov)
    return mean + rng.standard_normal((n, dim)) @ chol.T


def verify_families(
    dims=(1, 2, 3, 4),
    trials: int = 50,
    seed: int = 0,
    config: OracleConfig | None = None,
    abs_tol: float = ORACLE_ABS_TOL,
    margin_tol: float = ORACLE_MARGIN,
) -> list[FamilyCheck]:
    """Compare closed-form and oracle match scores across random datasets.

    For every family, fits ``trials`` seeded datasets both ways and checks
    that |M_closed - M_oracle| <= abs_tol and that the oracle never lands
    more than ``margin_tol`` below the closed form (which would contradict
    the closed form's optimality).
    """
    dims = tuple(int(d) for d in dims)
    if not dims or min(dims) < 1 or max(dims) > MAX_ORACLE_DIM:
        raise InvalidInputError(f"dims must lie in 1..{MAX_ORACLE_DIM}")
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    cfg = config if config is not None else OracleConfig()
    datasets = [_verification_dataset(seed, t, dims) for t in range(trials)]
    fixed_means = []
    for t, pts in enumerate(datasets):
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, t, 1])
        fixed_means.append(pts.mean(axis=0) + rng.normal(0.0, 1.0, pts.shape[1]))
    checks: list[FamilyCheck] = []
    for f_index, kind in enumerate(FAMILY_ORDER):
        diffs, margins = [], []
        for t, pts in enumerate(datasets):
            spec = (
                FamilySpec(kind, fixed_means[t])
                if kind in (Family.FIXED_MEAN, Family.FIXED_MEAN_ISOTROPIC, Family.FIXED_MEAN_DIAGONAL)
                else FamilySpec(kind)
            )
            closed = fit(estimate_moments(pts), spec)
            trial_cfg = replace(cfg, seed=cfg.seed + 7919 * t + f_index)
            numeric = oracle_minimize(pts, spec, trial_cfg)
            diffs.append(abs(numeric.match - closed.match))
            margins.append(numeric.match - closed.match)
        max_abs = float(max(diffs))
        worst = float(min(margins))
        checks.append(
            FamilyCheck(
                family=kind,
                trials=trials,
                max_abs_diff=max_abs,
                worst_margin=worst,
                passed=(max_abs <= abs_tol and worst >= -margin_tol),
            )
        )
    return checks
