"""Generalization-error identities for conjugate linear regression.

Per-configuration closed forms for the Bayes risk, the posterior-averaged
training term, the posterior-prior KL, the Gibbs risk of a single posterior
sample, the conditional Lautum information, and the average cumulative
regret -- plus shared-sample Monte-Carlo audits of the identities tying them
together:

* risk identity:   bayes = training + kl/N - sens_sum - chain_sum
* jensen gap:      gibbs - bayes = lautum/N + sens_sum + chain_sum - mi/N
* regret identity: cmi = regret - sens_sum - chain_sum

All audits compute every term on the same sampled configurations so common
Monte-Carlo noise cancels in the residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blr import fit, prefix_covariances, predictive
from .gaussian import LOG_2PI, LOG_2PIE, Gaussian, kl, spd_cholesky
from .single_task import Configuration, decompose


@dataclass(frozen=True)
class RealizedConfiguration:
    """A configuration together with a weight draw and sampled targets."""

    cfg: Configuration
    weights: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        if np.asarray(self.targets).size != self.cfg.n:
            raise ValueError("need one target per training input")


def sample_realized(cfg: Configuration, rng: np.random.Generator) -> RealizedConfiguration:
    """Draw w from the prior and targets from the likelihood at the inputs."""
    model = cfg.model
    ell = spd_cholesky(model.prior.cov)
    w = model.prior.mean + ell @ rng.standard_normal(model.dim)
    phi = model.feature_map.design_matrix(cfg.train_inputs)
    noise = rng.standard_normal(cfg.n) / np.sqrt(model.beta)
    return RealizedConfiguration(cfg=cfg, weights=w, targets=phi @ w + noise)


def bayes_risk(cfg: Configuration) -> float:
    """Posterior-predictive test entropy 1/2 ln(2 pi e sigma_N^2(x)); target-free."""
    post = fit(cfg.model, cfg.train_inputs)
    _, var = predictive(post, cfg.model, cfg.test_input)
    return 0.5 * (LOG_2PIE + np.log(var))


def training_term(rc: RealizedConfiguration) -> float:
    """(1/N) sum_n E_{w ~ posterior}[-ln p(y_n | x_n, w)].

    The inner posterior expectation is analytic: for each point,
    1/2 ln(2 pi / beta) + (beta/2)((y_n - m^T phi_n)^2 + phi_n^T S phi_n).
    """
    cfg = rc.cfg
    model = cfg.model
    post = fit(model, cfg.train_inputs, rc.targets)
    phi = model.feature_map.design_matrix(cfg.train_inputs)
    resid = rc.targets - phi @ post.mean
    quad = np.einsum("nd,dk,nk->n", phi, post.cov, phi)
    per_point = 0.5 * (LOG_2PI - np.log(model.beta)) + 0.5 * model.beta * (
        resid**2 + quad
    )
    return float(np.mean(per_point))


def posterior_prior_kl(rc: RealizedConfiguration) -> float:
    """KL(posterior || prior) for the realized targets."""
    cfg = rc.cfg
    post = fit(cfg.model, cfg.train_inputs, rc.targets)
    return kl(Gaussian(post.mean, post.cov), cfg.model.prior)


def gibbs_risk(cfg: Configuration) -> float:
    """Test risk of a single posterior-sampled parameter; target-free.

    Closed form 1/2 ln(2 pi / beta) + 1/2 + beta phi(x)^T S_N phi(x), from
    Cov(W - m_N | inputs) = S_N and the independence of the fresh posterior
    resample, so the parameter-error quadratic contributes twice
    phi^T S_N phi. Validated against a brute-force Monte-Carlo estimate over
    (W, y, posterior draw) in the test suite before anything relies on it.
    """
    post = fit(cfg.model, cfg.train_inputs)
    phi = cfg.model.feature_map.evaluate(cfg.test_input)
    quad = float(phi @ post.cov @ phi)
    beta = cfg.model.beta
    return 0.5 * (LOG_2PI - np.log(beta)) + 0.5 + beta * quad


def gibbs_mc_estimate(
    cfg: Configuration, n_samples: int, rng: np.random.Generator, chunk: int = 250_000
) -> tuple[float, float]:
    """Monte-Carlo estimate of the Gibbs risk and its standard error.

    Samples (w, training targets, fresh posterior draw, test target) in a
    fully vectorized sweep; the posterior draw uses the target-dependent
    mean and the fixed covariance of the conjugate posterior.
    """
    model = cfg.model
    d, n = model.dim, cfg.n
    phi = model.feature_map.design_matrix(cfg.train_inputs)
    phi_x = model.feature_map.evaluate(cfg.test_input)
    post = fit(model, cfg.train_inputs)
    ell_post = spd_cholesky(post.cov)
    ell_prior = spd_cholesky(model.prior.cov)
    beta = model.beta
    # m_N = S (S0^-1 m0 + beta Phi^T y): precompute the linear map y -> m_N
    from .gaussian import spd_inverse

    prior_prec = spd_inverse(model.prior.cov)
    m_const = post.cov @ (prior_prec @ model.prior.mean)
    m_map = beta * post.cov @ phi.T                     # (d, n)

    total = 0.0
    total_sq = 0.0
    seen = 0
    while seen < n_samples:
        s = min(chunk, n_samples - seen)
        w = model.prior.mean + rng.standard_normal((s, d)) @ ell_prior.T
        y = w @ phi.T + rng.standard_normal((s, n)) / np.sqrt(beta)
        m_n = m_const + y @ m_map.T
        w_tilde = m_n + rng.standard_normal((s, d)) @ ell_post.T
        y_test = w @ phi_x + rng.standard_normal(s) / np.sqrt(beta)
        loss = 0.5 * (LOG_2PI - np.log(beta)) + 0.5 * beta * (y_test - w_tilde @ phi_x) ** 2
        total += float(np.sum(loss))
        total_sq += float(np.sum(loss**2))
        seen += s
    mean = total / n_samples
    var = max(total_sq / n_samples - mean**2, 0.0)
    return mean, float(np.sqrt(var / n_samples))


def conditional_lautum(cfg: Configuration) -> float:
    """Conditional Lautum information via the Gibbs identity.

    lautum = N * (gibbs_risk - aleatoric entropy), with the aleatoric
    entropy exactly 1/2 ln(2 pi e / beta) per point. Reduces to
    N beta phi(x)^T S_N phi(x); nonnegative.
    """
    aleatoric = 0.5 * (LOG_2PIE - np.log(cfg.model.beta))
    return cfg.n * (gibbs_risk(cfg) - aleatoric)


def lautum_kl_form(cfg: Configuration) -> float:
    """Independent joint-Gaussian evaluation of the conditional Lautum.

    Assembles the joint covariance of (W, posterior resample W~) from the
    generative and posterior-sampling linear maps, then evaluates
    E KL(likelihood at W || likelihood at W~) over N points placed at the
    test input: N (beta/2) phi^T Cov(W - W~) phi.
    """
    model = cfg.model
    phi = model.feature_map.design_matrix(cfg.train_inputs)
    phi_x = model.feature_map.evaluate(cfg.test_input)
    post = fit(model, cfg.train_inputs)
    beta = model.beta
    s0 = model.prior.cov
    b = beta * post.cov @ phi.T @ phi              # W~ = B W + beta S Phi^T eps + zeta
    cov_w = s0
    cov_w_wt = s0 @ b.T
    cov_wt = b @ s0 @ b.T + beta * post.cov @ phi.T @ phi @ post.cov + post.cov
    cov_diff = cov_w + cov_wt - cov_w_wt - cov_w_wt.T
    return cfg.n * 0.5 * beta * float(phi_x @ cov_diff @ phi_x)


def jensen_gap(cfg: Configuration) -> float:
    """gibbs_risk - bayes_risk; nonnegative by convexity of the log loss."""
    return gibbs_risk(cfg) - bayes_risk(cfg)


def regret(cfg: Configuration) -> float:
    """Average cumulative regret of sequential prediction over the inputs.

    (1/N) sum_n [1/2 ln sigma^2_{(0..n-1)}(x_n) - 1/2 ln(1/beta)]: the
    excess risk paid at each round when predicting x_n from the first n-1
    points.
    """
    model = cfg.model
    covs = prefix_covariances(model, cfg.train_inputs)
    phi = model.feature_map.design_matrix(cfg.train_inputs)
    inv_beta = 1.0 / model.beta
    steps = [
        0.5 * (np.log(inv_beta + float(phi[k] @ covs[k] @ phi[k])) - np.log(inv_beta))
        for k in range(cfg.n)
    ]
    return float(np.mean(steps))


def regret_residual(cfg: Configuration) -> float:
    """Per-configuration residual of cmi = regret - sens_sum - chain_sum."""
    d = decompose(cfg)
    return d.cmi - (regret(cfg) - d.sens_test_sum - d.sens_chain_sum)


# ---------------------------------------------------------------------------
# Shared-sample audits


@dataclass(frozen=True)
class GenAudit:
    """Means of the risk-identity terms over shared samples, with residual."""

    bayes_risk: float
    training_term: float
    kl_over_n: float
    sens_test_sum: float
    sens_chain_sum: float
    residual: float
    stderr: float
    n_samples: int


def risk_identity_audit(
    realized: list[RealizedConfiguration],
) -> GenAudit:
    """Audit bayes = training + kl/N - sens - chain on shared samples."""
    if not realized:
        raise ValueError("need at least one realized configuration")
    rows = np.empty((len(realized), 5))
    for i, rc in enumerate(realized):
        cfg = rc.cfg
        d = decompose(cfg)
        rows[i] = (
            bayes_risk(cfg),
            training_term(rc),
            posterior_prior_kl(rc) / cfg.n,
            d.sens_test_sum,
            d.sens_chain_sum,
        )
    residuals = rows[:, 0] - (rows[:, 1] + rows[:, 2] - rows[:, 3] - rows[:, 4])
    means = rows.mean(axis=0)
    se = _stderr(residuals)
    return GenAudit(
        bayes_risk=float(means[0]),
        training_term=float(means[1]),
        kl_over_n=float(means[2]),
        sens_test_sum=float(means[3]),
        sens_chain_sum=float(means[4]),
        residual=float(residuals.mean()),
        stderr=se,
        n_samples=len(realized),
    )


@dataclass(frozen=True)
class JensenGapAudit:
    mean_gap: float
    mean_lautum_over_n: float
    residual: float
    stderr: float
    n_samples: int


def jensen_gap_audit(configs: list[Configuration]) -> JensenGapAudit:
    """Audit gibbs - bayes = lautum/N + sens + chain - mi/N on shared samples."""
    if not configs:
        raise ValueError("need at least one configuration")
    gaps = np.empty(len(configs))
    lautums = np.empty(len(configs))
    residuals = np.empty(len(configs))
    for i, cfg in enumerate(configs):
        d = decompose(cfg)
        gap = jensen_gap(cfg)
        li_rate = conditional_lautum(cfg) / cfg.n
        rhs = li_rate + d.sens_test_sum + d.sens_chain_sum - d.mi_rate
        gaps[i] = gap
        lautums[i] = li_rate
        residuals[i] = gap - rhs
    return JensenGapAudit(
        mean_gap=float(gaps.mean()),
        mean_lautum_over_n=float(lautums.mean()),
        residual=float(residuals.mean()),
        stderr=_stderr(residuals),
        n_samples=len(configs),
    )


@dataclass(frozen=True)
class RegretAudit:
    mean_regret: float
    residual: float
    stderr: float
    n_samples: int


def regret_audit(configs: list[Configuration]) -> RegretAudit:
    if not configs:
        raise ValueError("need at least one configuration")
    regrets = np.array([regret(c) for c in configs])
    residuals = np.array([regret_residual(c) for c in configs])
    return RegretAudit(
        mean_regret=float(regrets.mean()),
        residual=float(residuals.mean()),
        stderr=_stderr(residuals),
        n_samples=len(configs),
    )


def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))
