"""Conjugate Bayesian linear regression with an arbitrary Gaussian prior.

Posterior, predictive variance, rank-one update and Woodbury downdate. The
generalized prior N(m0, S0) is needed because hierarchical models condition
on learned, non-isotropic priors; the isotropic N(0, alpha^-1 I) case of the
classic formulas is a special case.

Posteriors are immutable values; update/downdate return new posteriors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateDowndate, DimMismatch
from .features import FeatureMap, make_constant
from .gaussian import Gaussian, spd_inverse, symmetrize

OMEGA_FLOOR = 1e-12


@dataclass(frozen=True)
class BlrModel:
    """Gaussian-likelihood linear model: y | x, w ~ N(w^T phi(x), 1/beta)."""

    prior: Gaussian
    beta: float
    feature_map: FeatureMap

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.prior.dim != self.feature_map.dim:
            raise DimMismatch(
                f"prior dim {self.prior.dim} != feature dim {self.feature_map.dim}"
            )

    @property
    def dim(self) -> int:
        return self.prior.dim


def isotropic_model(alpha: float, beta: float, feature_map: FeatureMap | None = None) -> BlrModel:
    """Model with prior N(0, alpha^-1 I). Defaults to the constant map."""
    if alpha <= 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    fmap = feature_map if feature_map is not None else make_constant()
    d = fmap.dim
    prior = Gaussian(np.zeros(d), np.eye(d) / alpha)
    return BlrModel(prior=prior, beta=beta, feature_map=fmap)


@dataclass(frozen=True)
class BlrPosterior:
    mean: np.ndarray
    cov: np.ndarray
    n_obs: int


def fit(model: BlrModel, inputs: np.ndarray, targets: np.ndarray | None = None) -> BlrPosterior:
    """Posterior from all data at once.

    S^-1 = S0^-1 + beta Phi^T Phi, m = S (S0^-1 m0 + beta Phi^T y). The
    posterior covariance does not depend on the targets; passing
    ``targets=None`` uses zeros, which is enough for every information
    quantity in this package.
    """
    inputs = np.atleast_1d(np.asarray(inputs, dtype=float)).ravel()
    if targets is None:
        targets = np.zeros(inputs.size)
    targets = np.atleast_1d(np.asarray(targets, dtype=float)).ravel()
    if inputs.size != targets.size:
        raise DimMismatch(f"{inputs.size} inputs vs {targets.size} targets")
    phi = model.feature_map.design_matrix(inputs)
    prior_prec = spd_inverse(model.prior.cov)
    precision = symmetrize(prior_prec + model.beta * phi.T @ phi)
    cov = spd_inverse(precision)
    mean = cov @ (prior_prec @ model.prior.mean + model.beta * phi.T @ targets)
    return BlrPosterior(mean=mean, cov=cov, n_obs=inputs.size)


def prior_posterior(model: BlrModel) -> BlrPosterior:
    """The prior viewed as the zero-data posterior."""
    return BlrPosterior(mean=model.prior.mean.copy(), cov=model.prior.cov.copy(), n_obs=0)


def predictive(posterior: BlrPosterior, model: BlrModel, x: float) -> tuple[float, float]:
    """Predictive mean and variance at x: (m^T phi, 1/beta + phi^T S phi)."""
    phi = model.feature_map.evaluate(x)
    mean = float(posterior.mean @ phi)
    var = 1.0 / model.beta + float(phi @ posterior.cov @ phi)
    return mean, var


def omega(posterior: BlrPosterior, model: BlrModel, x: float) -> float:
    """1/beta - phi(x)^T S phi(x).

    Strictly positive for any x among the fitted inputs (Schur-complement
    argument); may be <= 0 for an x never observed, in which case the point
    must not be downdated.
    """
    phi = model.feature_map.evaluate(x)
    return 1.0 / model.beta - float(phi @ posterior.cov @ phi)


def update(posterior: BlrPosterior, model: BlrModel, x: float, y: float) -> BlrPosterior:
    """Absorb one observation (Sherman-Morrison, O(d^2))."""
    phi = model.feature_map.evaluate(x)
    v = posterior.cov @ phi
    denom = 1.0 / model.beta + float(phi @ v)
    cov = symmetrize(posterior.cov - np.outer(v, v) / denom)
    mean = posterior.mean + v * ((y - float(posterior.mean @ phi)) / denom)
    return BlrPosterior(mean=mean, cov=cov, n_obs=posterior.n_obs + 1)


def downdate(posterior: BlrPosterior, model: BlrModel, x: float, y: float) -> BlrPosterior:
    """Remove one absorbed observation (Woodbury, O(d^2)).

    Requires omega(x) = 1/beta - phi^T S phi > 1e-12; exact arithmetic
    guarantees positivity for genuinely absorbed points, but floating point
    can undershoot, hence the floor.
    """
    phi = model.feature_map.evaluate(x)
    v = posterior.cov @ phi
    w = 1.0 / model.beta - float(phi @ v)
    if w <= OMEGA_FLOOR:
        raise DegenerateDowndate(f"omega = {w!r} at x = {x!r}")
    cov = symmetrize(posterior.cov + np.outer(v, v) / w)
    mean = posterior.mean - v * ((y - float(posterior.mean @ phi)) / w)
    return BlrPosterior(mean=mean, cov=cov, n_obs=posterior.n_obs - 1)


def prefix_covariances(model: BlrModel, inputs: np.ndarray) -> list[np.ndarray]:
    """Posterior covariances after absorbing 0, 1, ..., N points in order.

    Sequential Sherman-Morrison pass, O(N d^2) total. Element k is the
    covariance given inputs[:k]; element 0 is the prior covariance.
    """
    inputs = np.atleast_1d(np.asarray(inputs, dtype=float)).ravel()
    phi = model.feature_map.design_matrix(inputs)
    covs = [model.prior.cov.copy()]
    cov = model.prior.cov.copy()
    inv_beta = 1.0 / model.beta
    for k in range(inputs.size):
        v = cov @ phi[k]
        denom = inv_beta + float(phi[k] @ v)
        cov = symmetrize(cov - np.outer(v, v) / denom)
        covs.append(cov)
    return covs
