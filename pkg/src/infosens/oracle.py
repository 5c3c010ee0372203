"""Brute-force ground truth via explicit joint Gaussians.

Assembles the exact zero-mean joint covariance over (weights, hyperweights,
all target variables) for fixed inputs, then computes any conditional
entropy or (conditional) mutual information from log-determinants of Schur
complements. Every analytic quantity in the package is tested against this
module at small sizes (total joint dimension up to ~60).

Priors are zero-mean, so entropies depend only on covariances and target
values never enter the information quantities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimMismatch
from .gaussian import LOG_2PIE, chol_logdet, condition
from .single_task import Configuration


@dataclass(frozen=True)
class JointGaussian:
    """Labeled zero-mean joint Gaussian.

    ``labels`` maps a name (e.g. "W", "y[3]", "task1:y[0]", "y_test") to the
    index array of that block; label blocks partition the index range.
    """

    labels: dict[str, np.ndarray]
    mean: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def indices(self, names: Iterable[str]) -> np.ndarray:
        names = [names] if isinstance(names, str) else list(names)
        out: list[np.ndarray] = []
        for name in names:
            if name not in self.labels:
                raise KeyError(f"unknown label {name!r}")
            out.append(self.labels[name])
        if not out:
            return np.zeros(0, dtype=int)
        idx = np.concatenate(out)
        if np.unique(idx).size != idx.size:
            raise DimMismatch(f"labels {names!r} overlap")
        return idx


def build_single_task(cfg: Configuration) -> JointGaussian:
    """Joint over (W, y[0..N), y_test) for fixed inputs.

    Cov(W) = S0, Cov(W, y_i) = S0 phi_i, Cov(y_i, y_j) =
    phi_i^T S0 phi_j + delta_ij / beta, with the test target appended.
    """
    model = cfg.model
    d, n = model.dim, cfg.n
    fmap = model.feature_map
    phi = np.vstack([fmap.design_matrix(cfg.train_inputs), fmap.evaluate(cfg.test_input)])
    s0 = model.prior.cov
    dim = d + n + 1
    cov = np.zeros((dim, dim))
    cov[:d, :d] = s0
    cross = s0 @ phi.T                          # (d, n+1)
    cov[:d, d:] = cross
    cov[d:, :d] = cross.T
    cov[d:, d:] = phi @ s0 @ phi.T + np.eye(n + 1) / model.beta
    labels = {"W": np.arange(d)}
    for i in range(n):
        labels[f"y[{i}]"] = np.array([d + i])
    labels["y_test"] = np.array([d + n])
    return JointGaussian(labels=labels, mean=np.zeros(dim), cov=cov)


def build_meta(meta_cfg) -> JointGaussian:
    """Joint over (U, W, task m targets, meta-test train targets, y_test).

    With hyperprior variance 1/gamma, within-task prior variance 1/alpha and
    noise variance 1/beta:

        Cov(y_i^(m), y_j^(m')) = phi_i^T phi_j / gamma
                                 + delta_{mm'} phi_i^T phi_j / alpha
                                 + delta_{mm'} delta_{ij} / beta

    where the meta-test task (its N training points plus the test point)
    plays the role of task M+1 and shares the meta-test parameter W.
    """
    model = meta_cfg.model
    d = model.d
    fmap = model.feature_map
    tasks = [fmap.design_matrix(rows) for rows in meta_cfg.task_inputs]
    test_rows = np.append(
        np.atleast_1d(meta_cfg.test_task_inputs), meta_cfg.test_input
    )
    tasks.append(fmap.design_matrix(test_rows))
    m_count = len(tasks) - 1

    inv_g, inv_a, inv_b = 1.0 / model.gamma, 1.0 / model.alpha, 1.0 / model.beta
    sizes = [t.shape[0] for t in tasks]
    total = 2 * d + sum(sizes)
    cov = np.zeros((total, total))
    cov[:d, :d] = inv_g * np.eye(d)                       # U
    cov[d : 2 * d, d : 2 * d] = (inv_g + inv_a) * np.eye(d)  # meta-test W
    cov[:d, d : 2 * d] = inv_g * np.eye(d)
    cov[d : 2 * d, :d] = inv_g * np.eye(d)

    offsets = np.cumsum([2 * d] + sizes)
    starts = offsets[:-1]
    for a, (sa, ta) in enumerate(zip(starts, tasks)):
        ia = slice(sa, sa + ta.shape[0])
        # U and W cross-covariances with the targets
        cov[:d, ia] = inv_g * ta.T
        cov[ia, :d] = inv_g * ta
        w_scale = inv_g + inv_a if a == m_count else inv_g
        cov[d : 2 * d, ia] = w_scale * ta.T
        cov[ia, d : 2 * d] = w_scale * ta
        for b, (sb, tb) in enumerate(zip(starts, tasks)):
            ib = slice(sb, sb + tb.shape[0])
            block = inv_g * ta @ tb.T
            if a == b:
                block = block + inv_a * ta @ tb.T + inv_b * np.eye(ta.shape[0])
            cov[ia, ib] = block

    labels = {"U": np.arange(d), "W": np.arange(d, 2 * d)}
    for m in range(m_count):
        for i in range(sizes[m]):
            labels[f"task{m}:y[{i}]"] = np.array([starts[m] + i])
    n_test = sizes[-1] - 1
    for i in range(n_test):
        labels[f"test:y[{i}]"] = np.array([starts[-1] + i])
    labels["y_test"] = np.array([starts[-1] + n_test])
    return JointGaussian(labels=labels, mean=np.zeros(total), cov=cov)


def cond_entropy(
    joint: JointGaussian,
    target: Sequence[str] | str,
    given: Sequence[str] | str = (),
) -> float:
    """H(target | given) = (k/2) ln(2 pi e) + 1/2 ln det(Schur complement)."""
    t_idx = joint.indices(target)
    g_idx = joint.indices(given)
    if np.intersect1d(t_idx, g_idx).size:
        raise DimMismatch("target and given labels overlap")
    cond = condition(joint.mean, joint.cov, t_idx, g_idx)
    return 0.5 * t_idx.size * LOG_2PIE + 0.5 * chol_logdet(cond.cov)


def mi(
    joint: JointGaussian,
    a: Sequence[str] | str,
    b: Sequence[str] | str,
    given: Sequence[str] | str = (),
) -> float:
    """I(A; B | given) = H(A | given) - H(A | B, given)."""
    a_names = [a] if isinstance(a, str) else list(a)
    b_names = [b] if isinstance(b, str) else list(b)
    g_names = [given] if isinstance(given, str) else list(given)
    if set(a_names) & set(b_names) or set(a_names) & set(g_names) or set(b_names) & set(g_names):
        raise DimMismatch("A, B and given label sets must be pairwise disjoint")
    return cond_entropy(joint, a_names, g_names) - cond_entropy(
        joint, a_names, b_names + g_names
    )


def train_labels(n: int) -> list[str]:
    return [f"y[{i}]" for i in range(n)]


def task_labels(m: int, n: int) -> list[str]:
    return [f"task{m}:y[{i}]" for i in range(n)]


def test_task_labels(n: int) -> list[str]:
    return [f"test:y[{i}]" for i in range(n)]
