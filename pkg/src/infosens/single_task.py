"""Per-configuration information quantities for conjugate linear regression.

Everything here is conditioned on a fixed set of inputs (training inputs
plus one test input); expectations over input draws live in the experiment
harness. For Gaussian models all of these values are target-independent,
because posterior covariances do not depend on the targets.

The central identity decomposes the conditional mutual information between
the weights and the test target as

    cmi = mi/N - (1/N) sum_n I_n - (1/N) sum_{k=1}^{N-1} k * J_k

where I_n is the test sensitivity of training point n and J_k is the chain
term (predictive-variance drop at x_{k+1} from absorbing x_k given the first
k-1 points). The identity holds exactly in expectation over input draws, and
exactly per configuration when all inputs share one feature vector. The
multiplicity k on the chain terms comes from the nested double sum
sum_{k'=1}^{N-1} sum_{k=k'}^{N-1} J_k, which counts term k exactly k times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blr import (
    BlrModel,
    BlrPosterior,
    OMEGA_FLOOR,
    downdate,
    fit,
    prefix_covariances,
    predictive,
)
from .errors import ConfigError, DegenerateDowndate, NegativeInput
from .gaussian import chol_logdet


@dataclass(frozen=True)
class Configuration:
    """Fixed inputs on which all per-configuration quantities condition."""

    model: BlrModel
    train_inputs: np.ndarray
    test_input: float

    def __post_init__(self) -> None:
        inputs = np.atleast_1d(np.asarray(self.train_inputs, dtype=float)).ravel()
        object.__setattr__(self, "train_inputs", inputs)
        object.__setattr__(self, "test_input", float(self.test_input))

    @property
    def n(self) -> int:
        return int(self.train_inputs.size)


@dataclass(frozen=True)
class InfoDecomposition:
    """The four decomposition terms plus the audit residual, in nats.

    ``residual = cmi - (mi_rate - sens_test_sum - sens_chain_sum)``.
    """

    cmi: float
    mi_rate: float
    sens_test_sum: float
    sens_chain_sum: float
    residual: float
    per_point_sens: np.ndarray


@dataclass(frozen=True)
class SensitivityBounds:
    lower: float
    upper: float


def _posterior(cfg: Configuration) -> BlrPosterior:
    return fit(cfg.model, cfg.train_inputs)


def cmi(cfg: Configuration) -> float:
    """I(W; Y | X = x, training inputs) = 1/2 ln sigma_N^2(x) - 1/2 ln(1/beta)."""
    post = _posterior(cfg)
    _, var = predictive(post, cfg.model, cfg.test_input)
    return 0.5 * np.log(var) - 0.5 * np.log(1.0 / cfg.model.beta)


def mi(cfg: Configuration) -> float:
    """I(W; training targets | inputs) = 1/2 [ln det S0 - ln det S_N]."""
    post = _posterior(cfg)
    return 0.5 * (chol_logdet(cfg.model.prior.cov) - chol_logdet(post.cov))


def test_sensitivity(cfg: Configuration, n: int) -> float:
    """I_n: information training point n carries about the test target.

    1/2 ln sigma^2_{N \\ n}(x) - 1/2 ln sigma^2_N(x), with the leave-one-out
    variance from a Woodbury downdate. Nonnegative up to floating point.
    """
    post = _posterior(cfg)
    loo = downdate(post, cfg.model, cfg.train_inputs[n], 0.0)
    _, var_full = predictive(post, cfg.model, cfg.test_input)
    _, var_loo = predictive(loo, cfg.model, cfg.test_input)
    return 0.5 * (np.log(var_loo) - np.log(var_full))


def chain_term(cfg: Configuration, k: int) -> float:
    """J_k: predictive-variance drop at x[k+1] from absorbing x[k].

    1/2 ln sigma^2_{(0..k-1)}(x_{k+1}) - 1/2 ln sigma^2_{(0..k)}(x_{k+1}),
    for k in [0, N-2] (prefix posteriors over the first k and k+1 points).
    """
    if not 0 <= k <= cfg.n - 2:
        raise IndexError(f"chain index {k} outside [0, {cfg.n - 2}]")
    covs = prefix_covariances(cfg.model, cfg.train_inputs[: k + 1])
    phi = cfg.model.feature_map.evaluate(cfg.train_inputs[k + 1])
    inv_beta = 1.0 / cfg.model.beta
    var_before = inv_beta + float(phi @ covs[k] @ phi)
    var_after = inv_beta + float(phi @ covs[k + 1] @ phi)
    return 0.5 * (np.log(var_before) - np.log(var_after))


def chain_terms(cfg: Configuration) -> np.ndarray:
    """All chain terms J_0 .. J_{N-2} from one sequential pass."""
    covs = prefix_covariances(cfg.model, cfg.train_inputs)
    phi = cfg.model.feature_map.design_matrix(cfg.train_inputs)
    inv_beta = 1.0 / cfg.model.beta
    out = np.empty(max(cfg.n - 1, 0))
    for k in range(cfg.n - 1):
        w = phi[k + 1]
        var_before = inv_beta + float(w @ covs[k] @ w)
        var_after = inv_beta + float(w @ covs[k + 1] @ w)
        out[k] = 0.5 * (np.log(var_before) - np.log(var_after))
    return out


def per_point_sensitivities(cfg: Configuration) -> np.ndarray:
    """All I_n at once via the closed-form leave-one-out variance shift.

    For each n, sigma^2_{N\\n}(x) = sigma^2_N(x) + (phi(x)^T S_N phi_n)^2 /
    omega_n, which is the Woodbury downdate applied to the predictive.
    """
    post = _posterior(cfg)
    phi = cfg.model.feature_map.design_matrix(cfg.train_inputs)
    phi_x = cfg.model.feature_map.evaluate(cfg.test_input)
    inv_beta = 1.0 / cfg.model.beta
    s_phi = post.cov @ phi.T                      # (d, N)
    cross = phi_x @ s_phi                          # phi(x)^T S_N phi_n
    w = inv_beta - np.einsum("nd,dn->n", phi, s_phi)
    if np.any(w <= OMEGA_FLOOR):
        bad = int(np.argmin(w))
        raise DegenerateDowndate(f"omega = {w[bad]!r} at index {bad}")
    var_full = inv_beta + float(phi_x @ post.cov @ phi_x)
    var_loo = var_full + cross**2 / w
    return 0.5 * (np.log(var_loo) - np.log(var_full))


def decompose(cfg: Configuration) -> InfoDecomposition:
    """All decomposition terms for one configuration, O(N d^2)."""
    n = cfg.n
    if n < 1:
        raise ConfigError("decomposition needs at least one training point")
    cmi_val = cmi(cfg)
    mi_rate = mi(cfg) / n
    sens = per_point_sensitivities(cfg)
    sens_sum = float(np.sum(sens)) / n
    chain = chain_terms(cfg)
    weights = np.arange(1, n, dtype=float)
    chain_sum = float(weights @ chain) / n if n > 1 else 0.0
    residual = cmi_val - mi_rate + sens_sum + chain_sum
    return InfoDecomposition(
        cmi=cmi_val,
        mi_rate=mi_rate,
        sens_test_sum=sens_sum,
        sens_chain_sum=chain_sum,
        residual=residual,
        per_point_sens=sens,
    )


def mi_rate_bound(cfg: Configuration) -> float:
    """The MI-rate upper bound on the cmi: mi / N."""
    return mi(cfg) / cfg.n


def chain_tightened_bound(cfg: Configuration) -> float:
    """mi/N minus the weighted chain sum: tighter than the MI rate alone."""
    d = decompose(cfg)
    return d.mi_rate - d.sens_chain_sum


def sensitivity_sandwich(cfg: Configuration, n: int) -> SensitivityBounds:
    """Closed-form lower/upper bounds sandwiching I_n per configuration.

    With c = phi(x)^T S_N phi(x_n) and omega_n = 1/beta - phi_n^T S_N phi_n:

        lower = c^2 / (2 omega_n (phi(x)^T S0 phi(x) + 1/beta))
        upper = c^2 / (2 omega_n (1/beta + phi(x)^T S_N phi(x)))

    Both follow from (x-y)/(x+y) <= (ln x - ln y)/2 <= (x-y)/(2y) applied to
    the leave-one-out variance shift, so they hold pointwise.
    """
    post = _posterior(cfg)
    fmap = cfg.model.feature_map
    phi_n = fmap.evaluate(cfg.train_inputs[n])
    phi_x = fmap.evaluate(cfg.test_input)
    inv_beta = 1.0 / cfg.model.beta
    w = inv_beta - float(phi_n @ post.cov @ phi_n)
    if w <= OMEGA_FLOOR:
        raise DegenerateDowndate(f"omega = {w!r} at index {n}")
    c = float(phi_x @ post.cov @ phi_n)
    prior_quad = float(phi_x @ cfg.model.prior.cov @ phi_x)
    var_full = inv_beta + float(phi_x @ post.cov @ phi_x)
    lower = c**2 / (2.0 * w * (prior_quad + inv_beta))
    upper = c**2 / (2.0 * w * var_full)
    return SensitivityBounds(lower=lower, upper=upper)


def sensitivity_sandwich_all(cfg: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper sensitivity bounds for every training point at once."""
    post = _posterior(cfg)
    fmap = cfg.model.feature_map
    phi = fmap.design_matrix(cfg.train_inputs)
    phi_x = fmap.evaluate(cfg.test_input)
    inv_beta = 1.0 / cfg.model.beta
    s_phi = post.cov @ phi.T
    cross = phi_x @ s_phi
    w = inv_beta - np.einsum("nd,dn->n", phi, s_phi)
    if np.any(w <= OMEGA_FLOOR):
        bad = int(np.argmin(w))
        raise DegenerateDowndate(f"omega = {w[bad]!r} at index {bad}")
    prior_quad = float(phi_x @ cfg.model.prior.cov @ phi_x)
    var_full = inv_beta + float(phi_x @ post.cov @ phi_x)
    lower = cross**2 / (2.0 * w * (prior_quad + inv_beta))
    upper = cross**2 / (2.0 * w * var_full)
    return lower, upper


def subgaussian_mer_bound(sigma2: float, cmi_value: float) -> float:
    """sqrt(2 sigma^2 cmi): excess-risk bound for sigma^2-sub-Gaussian losses."""
    if sigma2 <= 0:
        raise NegativeInput(f"sigma2 must be positive, got {sigma2}")
    if cmi_value < 0:
        raise NegativeInput(f"cmi must be nonnegative, got {cmi_value}")
    return float(np.sqrt(2.0 * sigma2 * cmi_value))
