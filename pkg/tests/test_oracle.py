import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from infosens.blr import isotropic_model
from infosens.errors import DimMismatch
from infosens.features import make_constant, make_rbf_grid
from infosens.gaussian import LOG_2PIE, condition
from infosens.meta import MetaConfiguration, MetaModel
from infosens.oracle import (
    build_meta,
    build_single_task,
    cond_entropy,
    mi,
    task_labels,
    train_labels,
)
from infosens.oracle import test_task_labels as meta_test_labels
from infosens.single_task import Configuration

CONST = isotropic_model(1.0, 1.0, make_constant())


def const_cfg(n):
    return Configuration(model=CONST, train_inputs=np.zeros(n), test_input=0.0)


class TestBuildSingleTask:
    def test_constant_map_blocks(self):
        joint = build_single_task(const_cfg(1))
        y_block = joint.cov[1:, 1:]
        np.testing.assert_allclose(y_block, [[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(joint.cov[0, 1:], [1.0, 1.0])

    def test_covariance_matches_sample_covariance(self):
        rng = np.random.default_rng(3)
        model = isotropic_model(1.0, 1.0, make_rbf_grid(3, -2, 2))
        cfg = Configuration(
            model=model, train_inputs=rng.standard_normal(3), test_input=0.3
        )
        joint = build_single_task(cfg)
        phi = np.vstack(
            [model.feature_map.design_matrix(cfg.train_inputs),
             model.feature_map.evaluate(cfg.test_input)]
        )
        s = 10**6
        w = rng.standard_normal((s, 3))
        y = w @ phi.T + rng.standard_normal((s, 4))
        draws = np.hstack([w, y])
        sample_cov = np.cov(draws.T)
        # 3-SE elementwise tolerance for a Gaussian sample covariance
        c = joint.cov
        se = np.sqrt((np.outer(np.diag(c), np.diag(c)) + c**2) / s)
        assert np.all(np.abs(sample_cov - c) < 3.5 * se)


class TestBuildMeta:
    def test_single_task_reduction_after_marginalizing_hyperweights(self):
        model = MetaModel(1.0, 1.0, 1.0, make_constant())
        mc = MetaConfiguration(
            model=model,
            task_inputs=np.zeros((0, 2)),
            test_task_inputs=np.zeros(2),
            test_input=0.0,
        )
        joint = build_meta(mc)
        # y-covariance of the meta-test task: widened prior variance 2
        labels = meta_test_labels(2) + ["y_test"]
        idx = joint.indices(labels)
        expected = 2.0 * np.ones((3, 3)) + np.eye(3)
        np.testing.assert_allclose(joint.cov[np.ix_(idx, idx)], expected)

    def test_disjoint_support_tasks_share_only_hyper_covariance(self):
        # polynomial features vanish at x=0, so cross-task covariance with a
        # task observed at x=0 is exactly zero; at generic points it is
        # phi_i^T phi_j / gamma only
        model = MetaModel(1.0, 1.0, 2.0, make_constant())
        mc = MetaConfiguration(
            model=model,
            task_inputs=np.array([[0.5], [1.5]]),
            test_task_inputs=np.array([0.1]),
            test_input=0.2,
        )
        joint = build_meta(mc)
        i = joint.indices(task_labels(0, 1))[0]
        j = joint.indices(task_labels(1, 1))[0]
        assert joint.cov[i, j] == pytest.approx(0.5)  # 1/gamma

    def test_covariance_matches_sample_covariance(self):
        rng = np.random.default_rng(9)
        model = MetaModel(1.0, 1.0, 1.0, make_rbf_grid(2, -2, 2))
        mc = MetaConfiguration(
            model=model,
            task_inputs=rng.standard_normal((2, 2)),
            test_task_inputs=rng.standard_normal(2),
            test_input=0.1,
        )
        joint = build_meta(mc)
        s = 10**6
        u = rng.standard_normal((s, 2))
        fmap = model.feature_map
        blocks = [u, u + rng.standard_normal((s, 2))]  # U, meta-test W
        for t in range(2):
            w_t = u + rng.standard_normal((s, 2))
            phi = fmap.design_matrix(mc.task_inputs[t])
            blocks.append(w_t @ phi.T + rng.standard_normal((s, 2)))
        phi_test = np.vstack(
            [fmap.design_matrix(mc.test_task_inputs), fmap.evaluate(mc.test_input)]
        )
        blocks.append(blocks[1] @ phi_test.T + rng.standard_normal((s, 3)))
        draws = np.hstack(blocks)
        sample_cov = np.cov(draws.T)
        c = joint.cov
        se = np.sqrt((np.outer(np.diag(c), np.diag(c)) + c**2) / s)
        assert np.all(np.abs(sample_cov - c) < 3.5 * se)


class TestCondEntropy:
    def test_prior_predictive_entropy(self):
        joint = build_single_task(const_cfg(0))
        assert cond_entropy(joint, "y_test") == pytest.approx(
            0.5 * (LOG_2PIE + np.log(2.0)), abs=1e-12
        )

    def test_one_point_conditional(self):
        joint = build_single_task(const_cfg(1))
        assert cond_entropy(joint, "y_test", ["y[0]"]) == pytest.approx(
            0.5 * (LOG_2PIE + np.log(1.5)), abs=1e-12
        )

    def test_consistent_with_condition(self):
        rng = np.random.default_rng(21)
        model = isotropic_model(1.2, 0.9, make_rbf_grid(3, -2, 2))
        cfg = Configuration(model=model, train_inputs=rng.standard_normal(4), test_input=0.5)
        joint = build_single_task(cfg)
        cond = condition(
            joint.mean, joint.cov, joint.indices("y_test"), joint.indices(train_labels(4))
        )
        direct = 0.5 * LOG_2PIE + 0.5 * np.log(cond.cov[0, 0])
        assert cond_entropy(joint, "y_test", train_labels(4)) == pytest.approx(
            direct, abs=1e-10
        )


class TestMi:
    def test_independent_blocks(self):
        model = isotropic_model(1.0, 1.0, make_constant())
        cfg = Configuration(model=model, train_inputs=[0.0], test_input=0.0)
        joint = build_single_task(cfg)
        # noise is independent across targets given W, but y's correlate
        # through W; a fresh independent pair needs an explicit zero block
        cov = np.eye(2)
        from infosens.oracle import JointGaussian

        ind = JointGaussian(
            labels={"a": np.array([0]), "b": np.array([1])},
            mean=np.zeros(2),
            cov=cov,
        )
        assert abs(mi(ind, "a", "b")) < 1e-12
        assert mi(joint, "W", train_labels(1)) == pytest.approx(0.5 * np.log(2), abs=1e-12)

    def test_disjointness_enforced(self):
        joint = build_single_task(const_cfg(1))
        with pytest.raises(DimMismatch):
            mi(joint, "W", "W")

    @given(hst.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_symmetry_and_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        model = isotropic_model(1.0, 1.0, make_rbf_grid(3, -2, 2))
        cfg = Configuration(model=model, train_inputs=rng.standard_normal(4), test_input=0.2)
        joint = build_single_task(cfg)
        labels = train_labels(4)
        a, b, g = [labels[0]], [labels[1]], labels[2:]
        assert abs(mi(joint, a, b, g) - mi(joint, b, a, g)) < 1e-9
        assert mi(joint, a, b, g) >= -1e-9

    @given(hst.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_chain_rule(self, seed):
        rng = np.random.default_rng(seed)
        model = isotropic_model(1.0, 1.0, make_rbf_grid(3, -2, 2))
        cfg = Configuration(model=model, train_inputs=rng.standard_normal(4), test_input=0.2)
        joint = build_single_task(cfg)
        labels = train_labels(4)
        a = ["y_test"]
        b, c = [labels[0]], [labels[1]]
        joint_mi = mi(joint, a, b + c)
        chained = mi(joint, a, b) + mi(joint, a, c, b)
        assert abs(joint_mi - chained) < 1e-8
