"""Hierarchical Gaussian meta-learning.

Two-level conjugate model: hyperweights U ~ N(0, I/gamma), per-task weights
W_m | U ~ N(U, I/alpha), observations y | x, w ~ N(w^T phi(x), 1/beta). The
module provides the hyper-posterior, the task posterior given U, the exact
meta-test predictive, the meta excess risk, and the full decomposition into
within-task / hyper MI terms minus task- and data-level sensitivities and
chain terms.

Internals stay in d-dimensional form: with G_m = Phi_m^T Phi_m and
S_m = (alpha I + beta G_m)^-1, the per-task evidence moments are

    Phi_m^T s_m Phi_m = alpha beta G_m S_m,
    Phi_m^T s_m y_m   = alpha beta S_m Phi_m^T y_m,

which keeps every hyper-posterior update O(d^3) regardless of task size.

The meta-test predictive must condition the hyperweights on the meta-test
training data as well: p(U | Z^N, Z^{NM}) != p(U | Z^{NM}) because the
meta-test task also carries information about U. The explicit-variance path
therefore updates the hyper-posterior with the meta-test task as an extra
task before applying the variance formula; the generalized-prior path
arrives at the same answer by conditioning the collapsed prior
N(m_u, I/alpha + S_u) on the meta-test data, and the joint-Gaussian oracle
confirms both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blr import BlrModel, fit, predictive
from .errors import ConfigError
from .features import FeatureMap
from .gaussian import Gaussian, chol_logdet, spd_cholesky, spd_inverse, symmetrize
from .single_task import Configuration, decompose


@dataclass(frozen=True)
class MetaModel:
    alpha: float
    beta: float
    gamma: float
    feature_map: FeatureMap

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def d(self) -> int:
        return self.feature_map.dim


@dataclass(frozen=True)
class MetaConfiguration:
    """Fixed inputs of M equal-size tasks plus the meta-test task."""

    model: MetaModel
    task_inputs: np.ndarray          # (M, N)
    test_task_inputs: np.ndarray     # (N,)
    test_input: float
    task_targets: np.ndarray | None = None
    test_task_targets: np.ndarray | None = None

    def __post_init__(self) -> None:
        test_rows = np.atleast_1d(np.asarray(self.test_task_inputs, dtype=float)).ravel()
        tasks = np.asarray(self.task_inputs, dtype=float)
        if tasks.size == 0:
            tasks = tasks.reshape(0, test_rows.size)
        if tasks.ndim != 2:
            raise ConfigError("task_inputs must be a rectangular (M, N) array")
        object.__setattr__(self, "task_inputs", tasks)
        object.__setattr__(self, "test_task_inputs", test_rows)
        object.__setattr__(self, "test_input", float(self.test_input))
        if self.task_targets is not None:
            tt = np.asarray(self.task_targets, dtype=float).reshape(tasks.shape)
            object.__setattr__(self, "task_targets", tt)
        if self.test_task_targets is not None:
            yt = np.asarray(self.test_task_targets, dtype=float).ravel()
            if yt.size != test_rows.size:
                raise ConfigError("test_task_targets size mismatch")
            object.__setattr__(self, "test_task_targets", yt)

    @property
    def m(self) -> int:
        return int(self.task_inputs.shape[0])

    @property
    def n(self) -> int:
        return int(self.test_task_inputs.size)


@dataclass(frozen=True)
class HyperPosterior:
    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class MetaDecomposition:
    memr: float
    term_within: float
    term_hyper: float
    task_sens_sum: float
    task_chain_sum: float
    data_sens_sum: float
    data_chain_sum: float
    residual: float


def _task_moments(model: MetaModel, phi: np.ndarray, targets: np.ndarray | None):
    """(Phi^T s Phi, Phi^T s y) for one task, in d-dimensional form."""
    g = phi.T @ phi
    d = model.d
    st = spd_inverse(model.alpha * np.eye(d) + model.beta * g)
    prec_term = symmetrize(model.alpha * model.beta * g @ st)
    if targets is None:
        lin_term = np.zeros(d)
    else:
        lin_term = model.alpha * model.beta * st @ (phi.T @ targets)
    return prec_term, lin_term


def hyper_posterior(
    model: MetaModel,
    task_inputs: np.ndarray,
    task_targets: np.ndarray | None = None,
) -> HyperPosterior:
    """Posterior over the hyperweights given the training tasks.

    S_u^-1 = gamma I + sum_m Phi_m^T s_m Phi_m  with
    s_m^-1 = I/beta + Phi_m Phi_m^T / alpha, and
    m_u = S_u sum_m Phi_m^T s_m y_m. The prior precision gamma I enters
    once, which is the reading the joint-Gaussian oracle confirms (adding it
    per task would give M gamma I and disagrees with the oracle for M >= 2).
    With no tasks this is the hyperprior N(0, I/gamma).
    """
    d = model.d
    tasks = np.asarray(task_inputs, dtype=float)
    if tasks.size == 0:
        return HyperPosterior(mean=np.zeros(d), cov=np.eye(d) / model.gamma)
    precision = model.gamma * np.eye(d)
    linear = np.zeros(d)
    for idx in range(tasks.shape[0]):
        phi = model.feature_map.design_matrix(tasks[idx])
        y = None if task_targets is None else np.asarray(task_targets, float)[idx]
        prec_term, lin_term = _task_moments(model, phi, y)
        precision = precision + prec_term
        linear = linear + lin_term
    cov = spd_inverse(precision)
    return HyperPosterior(mean=cov @ linear, cov=cov)


def task_posterior(model: MetaModel, u: np.ndarray, inputs: np.ndarray, targets: np.ndarray):
    """Posterior over one task's weights given its data and U = u.

    m_t = S_t (beta Phi^T y + alpha u), S_t^-1 = alpha I + beta Phi^T Phi:
    exactly conjugate regression with prior N(u, I/alpha).
    """
    prior = Gaussian(np.asarray(u, dtype=float), np.eye(model.d) / model.alpha)
    blr = BlrModel(prior=prior, beta=model.beta, feature_map=model.feature_map)
    return fit(blr, inputs, targets)


def conditional_prior(model: MetaModel, hp: HyperPosterior) -> Gaussian:
    """Meta-test weight distribution given the conditioning tasks:
    W | tasks ~ N(m_u, I/alpha + S_u)."""
    return Gaussian(hp.mean, np.eye(model.d) / model.alpha + hp.cov)


def conditional_blr(model: MetaModel, hp: HyperPosterior) -> BlrModel:
    """Single-task model for the meta-test task conditioned on the tasks."""
    return BlrModel(prior=conditional_prior(model, hp), beta=model.beta,
                    feature_map=model.feature_map)


def meta_predictive(meta_cfg: MetaConfiguration) -> tuple[float, float]:
    """Exact meta-test predictive (mean, variance) at the test input.

    Generalized-prior path: condition W on the meta-training tasks, then run
    conjugate regression on the meta-test training data.
    """
    model = meta_cfg.model
    hp = hyper_posterior(model, meta_cfg.task_inputs, meta_cfg.task_targets)
    blr = conditional_blr(model, hp)
    targets = meta_cfg.test_task_targets
    post = fit(blr, meta_cfg.test_task_inputs, targets)
    return predictive(post, blr, meta_cfg.test_input)


def meta_predictive_explicit(meta_cfg: MetaConfiguration) -> tuple[float, float]:
    """Explicit-variance path for the meta-test predictive.

    S_f = 1/beta + phi^T S_t phi + (alpha S_t phi)^T S_u* (alpha S_t phi) and
    m_f = beta y^T Phi_t S_t phi + alpha m_u*^T S_t phi, where (m_u*, S_u*)
    is the hyper-posterior updated with the meta-test training task as an
    (M+1)-th task. Must agree with :func:`meta_predictive` to 1e-9.
    """
    model = meta_cfg.model
    n = meta_cfg.n
    all_inputs = np.vstack([meta_cfg.task_inputs, meta_cfg.test_task_inputs.reshape(1, n)])
    if meta_cfg.task_targets is None and meta_cfg.test_task_targets is None:
        all_targets = None
    else:
        tt = meta_cfg.task_targets if meta_cfg.task_targets is not None else np.zeros(
            meta_cfg.task_inputs.shape
        )
        yt = (
            meta_cfg.test_task_targets
            if meta_cfg.test_task_targets is not None
            else np.zeros(n)
        )
        all_targets = np.vstack([tt, yt.reshape(1, n)])
    hp_full = hyper_posterior(model, all_inputs, all_targets)

    phi_t = model.feature_map.design_matrix(meta_cfg.test_task_inputs)
    phi_x = model.feature_map.evaluate(meta_cfg.test_input)
    st = spd_inverse(model.alpha * np.eye(model.d) + model.beta * phi_t.T @ phi_t)
    v = model.alpha * st @ phi_x
    s_f = 1.0 / model.beta + float(phi_x @ st @ phi_x) + float(v @ hp_full.cov @ v)
    yt = meta_cfg.test_task_targets if meta_cfg.test_task_targets is not None else np.zeros(n)
    m_f = model.beta * float(yt @ phi_t @ st @ phi_x) + float(
        model.alpha * hp_full.mean @ st @ phi_x
    )
    return m_f, s_f


def memr(meta_cfg: MetaConfiguration) -> float:
    """Meta excess risk 1/2 ln(S_f(x) beta); monotone map of the predictive variance."""
    _, s_f = meta_predictive(meta_cfg)
    return 0.5 * np.log(s_f * meta_cfg.model.beta)


def within_task_mi(meta_cfg: MetaConfiguration) -> float:
    """I(W; meta-test training targets | U, inputs) = 1/2 ln det(I + (beta/alpha) G_t)."""
    model = meta_cfg.model
    phi_t = model.feature_map.design_matrix(meta_cfg.test_task_inputs)
    return 0.5 * chol_logdet(
        np.eye(model.d) + (model.beta / model.alpha) * phi_t.T @ phi_t
    )


def hyper_mi(meta_cfg: MetaConfiguration) -> float:
    """I(U; all meta-training targets | inputs) = 1/2 [ln det(I/gamma) - ln det S_u]."""
    model = meta_cfg.model
    hp = hyper_posterior(model, meta_cfg.task_inputs)
    return 0.5 * (
        chol_logdet(np.eye(model.d) / model.gamma) - chol_logdet(hp.cov)
    )


def _target_block_logdet(model: MetaModel, phi: np.ndarray, weight_cov: np.ndarray) -> float:
    """ln det(I/beta + Phi P Phi^T) in d-dimensional form.

    det(I_N/beta + Phi P Phi^T) = beta^-N det(I_d + beta L^T G L), P = L L^T.
    """
    n = phi.shape[0]
    ell = spd_cholesky(weight_cov)
    inner = np.eye(model.d) + model.beta * ell.T @ (phi.T @ phi) @ ell
    return -n * np.log(model.beta) + chol_logdet(inner)


def _task_precisions(meta_cfg: MetaConfiguration) -> list[np.ndarray]:
    model = meta_cfg.model
    out = []
    for idx in range(meta_cfg.m):
        phi = model.feature_map.design_matrix(meta_cfg.task_inputs[idx])
        prec_term, _ = _task_moments(model, phi, None)
        out.append(prec_term)
    return out


def _weight_cov_from_subset(model: MetaModel, terms: list[np.ndarray]) -> np.ndarray:
    precision = model.gamma * np.eye(model.d)
    for t in terms:
        precision = precision + t
    su = spd_inverse(precision)
    return np.eye(model.d) / model.alpha + su


def task_sensitivity(meta_cfg: MetaConfiguration, m: int) -> float:
    """Information task m carries about the meta-test task given the others.

    1/2 [ln det Sigma_{without m} - ln det Sigma_{all}], where Sigma_S is
    the covariance of the meta-test training target vector given task subset
    S: I/beta + Phi_t (I/alpha + S_u(S)) Phi_t^T. Nonnegative.
    """
    if not 0 <= m < meta_cfg.m:
        raise IndexError(f"task index {m} outside [0, {meta_cfg.m - 1}]")
    model = meta_cfg.model
    terms = _task_precisions(meta_cfg)
    phi_t = model.feature_map.design_matrix(meta_cfg.test_task_inputs)
    cov_without = _weight_cov_from_subset(model, terms[:m] + terms[m + 1 :])
    cov_full = _weight_cov_from_subset(model, terms)
    return 0.5 * (
        _target_block_logdet(model, phi_t, cov_without)
        - _target_block_logdet(model, phi_t, cov_full)
    )


def task_chain_term(meta_cfg: MetaConfiguration, k: int) -> float:
    """Uncertainty drop at task k+1's targets from absorbing task k.

    1/2 [ln det Sigma(task k+1 | tasks 0..k-1) - ln det Sigma(task k+1 |
    tasks 0..k)] for k in [0, M-2]; the task-level mirror of the data-level
    chain terms.
    """
    if not 0 <= k <= meta_cfg.m - 2:
        raise IndexError(f"task chain index {k} outside [0, {meta_cfg.m - 2}]")
    model = meta_cfg.model
    terms = _task_precisions(meta_cfg)
    phi_next = model.feature_map.design_matrix(meta_cfg.task_inputs[k + 1])
    cov_before = _weight_cov_from_subset(model, terms[:k])
    cov_after = _weight_cov_from_subset(model, terms[: k + 1])
    return 0.5 * (
        _target_block_logdet(model, phi_next, cov_before)
        - _target_block_logdet(model, phi_next, cov_after)
    )


def _conditional_configuration(meta_cfg: MetaConfiguration) -> Configuration:
    """Meta-test task as a single-task configuration conditioned on the tasks."""
    model = meta_cfg.model
    hp = hyper_posterior(model, meta_cfg.task_inputs, meta_cfg.task_targets)
    return Configuration(
        model=conditional_blr(model, hp),
        train_inputs=meta_cfg.test_task_inputs,
        test_input=meta_cfg.test_input,
    )


def _collapsed_configuration(meta_cfg: MetaConfiguration) -> Configuration:
    """M = 0 collapse: single-task model with prior N(0, (1/alpha + 1/gamma) I)."""
    model = meta_cfg.model
    prior = Gaussian(
        np.zeros(model.d), (1.0 / model.alpha + 1.0 / model.gamma) * np.eye(model.d)
    )
    blr = BlrModel(prior=prior, beta=model.beta, feature_map=model.feature_map)
    return Configuration(
        model=blr, train_inputs=meta_cfg.test_task_inputs, test_input=meta_cfg.test_input
    )


def decompose_meta(meta_cfg: MetaConfiguration) -> MetaDecomposition:
    """All decomposition terms for one meta configuration.

    residual = memr - (within/N + hyper/(NM) - task_sens_sum -
    task_chain_sum - data_sens_sum - data_chain_sum), with task chain term k
    carrying multiplicity k+1, mirroring the data-level weighting. Per-task
    evidence moments are computed once and shared across all task-level
    terms. With M = 0 the hierarchy collapses to the widened-prior
    single-task decomposition (term_hyper and the task sums are zero).
    """
    n, m_count = meta_cfg.n, meta_cfg.m
    if m_count > 0 and meta_cfg.task_inputs.shape[1] != n:
        raise ConfigError(
            f"decomposition requires equal task sizes: tasks have "
            f"{meta_cfg.task_inputs.shape[1]} points, meta-test has {n}"
        )
    if m_count == 0:
        d = decompose(_collapsed_configuration(meta_cfg))
        return MetaDecomposition(
            memr=d.cmi,
            term_within=d.mi_rate,
            term_hyper=0.0,
            task_sens_sum=0.0,
            task_chain_sum=0.0,
            data_sens_sum=d.sens_test_sum,
            data_chain_sum=d.sens_chain_sum,
            residual=d.residual,
        )
    model = meta_cfg.model
    d_dim = model.d
    terms = _task_precisions(meta_cfg)
    total = model.gamma * np.eye(d_dim)
    for t in terms:
        total = total + t
    su_full = spd_inverse(total)
    phi_t = model.feature_map.design_matrix(meta_cfg.test_task_inputs)

    # conditional single-task view of the meta-test task: gives the meta
    # excess risk and both data-level sums in one pass
    cond_prior = Gaussian(np.zeros(d_dim), np.eye(d_dim) / model.alpha + su_full)
    cond_cfg = Configuration(
        model=BlrModel(prior=cond_prior, beta=model.beta, feature_map=model.feature_map),
        train_inputs=meta_cfg.test_task_inputs,
        test_input=meta_cfg.test_input,
    )
    dd = decompose(cond_cfg)
    memr_val = dd.cmi
    data_sens_sum = dd.sens_test_sum
    data_chain_sum = dd.sens_chain_sum

    term_within = 0.5 * chol_logdet(
        np.eye(d_dim) + (model.beta / model.alpha) * phi_t.T @ phi_t
    ) / n
    term_hyper = 0.5 * (
        chol_logdet(np.eye(d_dim) / model.gamma) - chol_logdet(su_full)
    ) / (n * m_count)

    logdet_full = _target_block_logdet(
        model, phi_t, np.eye(d_dim) / model.alpha + su_full
    )
    task_sens = np.empty(m_count)
    for j in range(m_count):
        cov_without = np.eye(d_dim) / model.alpha + spd_inverse(total - terms[j])
        task_sens[j] = 0.5 * (
            _target_block_logdet(model, phi_t, cov_without) - logdet_full
        )
    task_sens_sum = float(np.sum(task_sens)) / (n * m_count)

    task_chain_sum = 0.0
    if m_count > 1:
        prefix = model.gamma * np.eye(d_dim)
        chain = np.empty(m_count - 1)
        for k in range(m_count - 1):
            phi_next = model.feature_map.design_matrix(meta_cfg.task_inputs[k + 1])
            cov_before = np.eye(d_dim) / model.alpha + spd_inverse(prefix)
            prefix = prefix + terms[k]
            cov_after = np.eye(d_dim) / model.alpha + spd_inverse(prefix)
            chain[k] = 0.5 * (
                _target_block_logdet(model, phi_next, cov_before)
                - _target_block_logdet(model, phi_next, cov_after)
            )
        weights = np.arange(1, m_count, dtype=float)
        task_chain_sum = float(weights @ chain) / (n * m_count)

    residual = memr_val - (
        term_within
        + term_hyper
        - task_sens_sum
        - task_chain_sum
        - data_sens_sum
        - data_chain_sum
    )
    return MetaDecomposition(
        memr=memr_val,
        term_within=term_within,
        term_hyper=term_hyper,
        task_sens_sum=task_sens_sum,
        task_chain_sum=task_chain_sum,
        data_sens_sum=data_sens_sum,
        data_chain_sum=data_chain_sum,
        residual=residual,
    )


def meta_mi_bound(meta_cfg: MetaConfiguration) -> float:
    """Upper bound hyper/(NM) + within/N on the meta excess risk.

    With M = 0 the hierarchy collapses and this is the widened-prior MI/N.
    """
    if meta_cfg.m == 0:
        cfg = _collapsed_configuration(meta_cfg)
        from .single_task import mi as single_mi

        return single_mi(cfg) / meta_cfg.n
    return within_task_mi(meta_cfg) / meta_cfg.n + hyper_mi(meta_cfg) / (
        meta_cfg.n * meta_cfg.m
    )


def meta_chain_tightened_bound(meta_cfg: MetaConfiguration) -> float:
    """MI bound minus both chain sums; tighter, still above the excess risk."""
    d = decompose_meta(meta_cfg)
    return d.term_within + d.term_hyper - d.task_chain_sum - d.data_chain_sum
