"""Closed-form information-theoretic uncertainty for conjugate Gaussian models.

Computes, decomposes, and cross-verifies the conditional mutual information
between model weights and test targets, per-point and per-task sensitivities,
generalization identities, and their bounds, for Bayesian linear regression
and its hierarchical (meta-learning) extension -- all validated against a
brute-force joint-Gaussian oracle.
"""

from .blr import BlrModel, BlrPosterior, downdate, fit, isotropic_model, omega, predictive, update
from .errors import (
    BadGrid,
    ConfigError,
    DegenerateDowndate,
    DimMismatch,
    InfosensError,
    InsufficientGrid,
    NegativeInput,
    NotPositiveDefinite,
)
from .features import FeatureMap, make_constant, make_polynomial, make_rbf_grid
from .gaussian import Gaussian, chol_logdet, condition, entropy, kl
from .harness import ExperimentConfig, emit, run_identity_audits, run_oracle_check
from .meta import MetaConfiguration, MetaModel, decompose_meta, hyper_posterior, memr
from .single_task import (
    Configuration,
    InfoDecomposition,
    SensitivityBounds,
    chain_term,
    cmi,
    decompose,
    mi,
    sensitivity_sandwich,
    subgaussian_mer_bound,
    test_sensitivity,
)

__version__ = "0.1.0"

__all__ = [
    "BadGrid",
    "BlrModel",
    "BlrPosterior",
    "ConfigError",
    "Configuration",
    "DegenerateDowndate",
    "DimMismatch",
    "ExperimentConfig",
    "FeatureMap",
    "Gaussian",
    "InfoDecomposition",
    "InfosensError",
    "InsufficientGrid",
    "MetaConfiguration",
    "MetaModel",
    "NegativeInput",
    "NotPositiveDefinite",
    "SensitivityBounds",
    "chain_term",
    "chol_logdet",
    "cmi",
    "condition",
    "decompose",
    "decompose_meta",
    "downdate",
    "emit",
    "entropy",
    "fit",
    "hyper_posterior",
    "isotropic_model",
    "kl",
    "make_constant",
    "make_polynomial",
    "make_rbf_grid",
    "memr",
    "mi",
    "omega",
    "predictive",
    "run_identity_audits",
    "run_oracle_check",
    "sensitivity_sandwich",
    "subgaussian_mer_bound",
    "test_sensitivity",
    "update",
]
