"""Dense Gaussian linear algebra.

SPD factorization, log-determinants, entropies and KL divergences of
multivariate Gaussians, and conditioning of a joint Gaussian on a subset of
its coordinates via Schur complements. All information quantities are in nats.

Covariance inputs are symmetrized ((A + A^T)/2) before factorization because
accumulated rank-one updates drift asymmetrically. There is no automatic
jitter: a failed pivot raises :class:`NotPositiveDefinite` so that identity
residual tests upstream are never silently corrupted by regularization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotPositiveDefinite

LOG_2PI = float(np.log(2.0 * np.pi))
LOG_2PIE = float(np.log(2.0 * np.pi) + 1.0)


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + A^T)/2."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def spd_cholesky(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a symmetrized SPD matrix.

    Raises
    ------
    NotPositiveDefinite
        If any pivot is <= 0, signalling an invalid covariance upstream.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
    try:
        return np.linalg.cholesky(symmetrize(a))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def chol_logdet(a: np.ndarray) -> float:
    """ln det(A) for SPD A, via the triangular factor."""
    ell = spd_cholesky(a)
    return float(2.0 * np.sum(np.log(np.diag(ell))))


def spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for SPD A through its Cholesky factor."""
    ell = spd_cholesky(a)
    y = np.linalg.solve(ell, b)
    return np.linalg.solve(ell.T, y)


def spd_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of an SPD matrix, symmetrized."""
    return symmetrize(spd_solve(a, np.eye(np.asarray(a).shape[0])))


@dataclass(frozen=True)
class Gaussian:
    """A multivariate Gaussian: mean vector plus SPD covariance.

    The universal carrier for priors, posteriors and predictive
    distributions throughout the package.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if cov.shape[0] != cov.shape[1]:
            raise DimMismatch(f"covariance is not square: {cov.shape}")
        if mean.shape[0] != cov.shape[0]:
            raise DimMismatch(
                f"mean dim {mean.shape[0]} != cov dim {cov.shape[0]}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def entropy(g: Gaussian) -> float:
    """Differential entropy (k/2) ln(2*pi*e) + 1/2 ln det(cov), in nats."""
    return 0.5 * g.dim * LOG_2PIE + 0.5 * chol_logdet(g.cov)


def kl(p: Gaussian, q: Gaussian) -> float:
    """KL(p || q) between Gaussians of equal dimension, in nats.

    The closed form can dip a hair below zero in floating point; callers
    asserting nonnegativity should allow -1e-12.
    """
    if p.dim != q.dim:
        raise DimMismatch(f"dims differ: {p.dim} vs {q.dim}")
    lq = spd_cholesky(q.cov)
    # tr(Sq^-1 Sp) via triangular solves
    half = np.linalg.solve(lq, p.cov)
    trace = float(np.trace(np.linalg.solve(lq.T, half)))
    delta = q.mean - p.mean
    w = np.linalg.solve(lq, delta)
    maha = float(w @ w)
    logdet_q = float(2.0 * np.sum(np.log(np.diag(lq))))
    logdet_p = chol_logdet(p.cov)
    return 0.5 * (trace + maha - p.dim + logdet_q - logdet_p)


@dataclass(frozen=True)
class ConditionalGaussian:
    """Gaussian conditional: value-independent covariance plus affine mean.

    The conditional mean is ``offset + coef @ given_values``. For an empty
    conditioning set this is the marginal (coef has zero columns).
    """

    offset: np.ndarray
    coef: np.ndarray
    cov: np.ndarray

    def mean_given(self, values: np.ndarray) -> np.ndarray:
        values = np.atleast_1d(np.asarray(values, dtype=float))
        return self.offset + self.coef @ values

    def at(self, values: np.ndarray) -> Gaussian:
        return Gaussian(self.mean_given(values), self.cov)


def condition(
    mean: np.ndarray,
    cov: np.ndarray,
    target: np.ndarray,
    given: np.ndarray,
) -> ConditionalGaussian:
    """Condition a joint Gaussian on a subset of coordinates.

    ``target`` and ``given`` are disjoint index arrays into the joint.
    Returns the Schur-complement covariance Sigma_TT - Sigma_TG Sigma_GG^-1
    Sigma_GT, which does not depend on the conditioning values, together
    with the affine map producing the conditional mean.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    target = np.asarray(target, dtype=int)
    given = np.asarray(given, dtype=int)
    if np.intersect1d(target, given).size:
        raise DimMismatch("target and given index sets overlap")
    if given.size == 0:
        return ConditionalGaussian(
            offset=mean[target],
            coef=np.zeros((target.size, 0)),
            cov=symmetrize(cov[np.ix_(target, target)]),
        )
    s_tt = cov[np.ix_(target, target)]
    s_tg = cov[np.ix_(target, given)]
    s_gg = cov[np.ix_(given, given)]
    coef = spd_solve(s_gg, s_tg.T).T
    cond_cov = symmetrize(s_tt - coef @ s_tg.T)
    offset = mean[target] - coef @ mean[given]
    return ConditionalGaussian(offset=offset, coef=coef, cov=cond_cov)
