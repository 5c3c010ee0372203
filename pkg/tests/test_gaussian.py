import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from infosens.errors import DimMismatch, NotPositiveDefinite
from infosens.gaussian import (
    LOG_2PIE,
    Gaussian,
    chol_logdet,
    condition,
    entropy,
    kl,
    spd_inverse,
)

STD_NORMAL_ENTROPY = 1.4189385332046727  # 0.5 * ln(2 pi e)


def brute_force_det(a: np.ndarray) -> float:
    """Cofactor expansion along the first row; independent oracle, dim <= 5."""
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += ((-1.0) ** j) * a[0, j] * brute_force_det(minor)
    return total


def random_spd(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    b = rng.standard_normal((dim, dim))
    return scale * (b @ b.T) + np.eye(dim)


@hst.composite
def spd_matrices(draw, max_dim: int = 4):
    dim = draw(hst.integers(1, max_dim))
    seed = draw(hst.integers(0, 2**32 - 1))
    return random_spd(np.random.default_rng(seed), dim)


class TestCholLogdet:
    def test_identity(self):
        assert chol_logdet(np.eye(3)) == pytest.approx(0.0, abs=1e-14)

    def test_diagonal(self):
        assert chol_logdet(np.diag([2.0, 2.0])) == pytest.approx(2 * np.log(2), abs=1e-12)

    def test_matches_cofactor_expansion(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            a = random_spd(rng, 5)
            assert chol_logdet(a) == pytest.approx(np.log(brute_force_det(a)), abs=1e-10)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            chol_logdet(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimMismatch):
            chol_logdet(np.ones((2, 3)))

    @given(spd_matrices())
    @settings(max_examples=25, deadline=None)
    def test_logdet_of_inverse_cancels(self, a):
        if np.linalg.cond(a) < 1e6:
            assert abs(chol_logdet(a) + chol_logdet(spd_inverse(a))) < 1e-8


class TestEntropy:
    def test_standard_normal(self):
        g = Gaussian(np.zeros(1), np.eye(1))
        assert entropy(g) == pytest.approx(STD_NORMAL_ENTROPY, abs=1e-10)

    def test_scale_rule(self):
        g = Gaussian(np.zeros(1), 4.0 * np.eye(1))
        assert entropy(g) == pytest.approx(STD_NORMAL_ENTROPY + 0.5 * np.log(4), abs=1e-10)
        assert entropy(g) == pytest.approx(2.1120857137, abs=1e-9)

    def test_additivity_of_independent_coordinates(self):
        g = Gaussian(np.zeros(2), np.eye(2))
        assert entropy(g) == pytest.approx(2 * STD_NORMAL_ENTROPY, abs=1e-10)


class TestKl:
    def test_identical_is_zero(self):
        p = Gaussian(np.zeros(1), np.eye(1))
        assert kl(p, p) == pytest.approx(0.0, abs=1e-12)

    def test_mean_shift(self):
        p = Gaussian(np.array([1.0]), np.eye(1))
        q = Gaussian(np.array([0.0]), np.eye(1))
        assert kl(p, q) == pytest.approx(0.5, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            kl(Gaussian(np.zeros(1), np.eye(1)), Gaussian(np.zeros(2), np.eye(2)))

    def test_matches_sampling_oracle(self):
        # Monte-Carlo estimate of E_p[ln p - ln q] on a random dim-3 pair
        rng = np.random.default_rng(77)
        p = Gaussian(rng.standard_normal(3), random_spd(rng, 3))
        q = Gaussian(rng.standard_normal(3), random_spd(rng, 3))
        n = 10**6
        lp = np.linalg.cholesky(p.cov)
        x = p.mean + rng.standard_normal((n, 3)) @ lp.T

        def logpdf(pts, g):
            ell = np.linalg.cholesky(g.cov)
            z = np.linalg.solve(ell, (pts - g.mean).T)
            return -0.5 * np.sum(z**2, axis=0) - np.sum(np.log(np.diag(ell))) - 1.5 * np.log(2 * np.pi)

        diffs = logpdf(x, p) - logpdf(x, q)
        se = diffs.std(ddof=1) / np.sqrt(n)
        assert abs(kl(p, q) - diffs.mean()) < 3 * se

    @given(spd_matrices(3), spd_matrices(3))
    @settings(max_examples=25, deadline=None)
    def test_nonnegative(self, a, b):
        if a.shape != b.shape:
            return
        d = a.shape[0]
        p = Gaussian(np.zeros(d), a)
        q = Gaussian(np.ones(d), b)
        assert kl(p, q) >= -1e-12


class TestCondition:
    def test_two_by_two(self):
        cov = np.array([[2.0, 1.0], [1.0, 2.0]])
        cond = condition(np.zeros(2), cov, np.array([0]), np.array([1]))
        assert cond.cov[0, 0] == pytest.approx(1.5, abs=1e-12)

    def test_empty_given_returns_marginal(self):
        cov = np.array([[2.0, 1.0], [1.0, 2.0]])
        cond = condition(np.zeros(2), cov, np.array([1]), np.array([], dtype=int))
        assert cond.cov[0, 0] == pytest.approx(2.0)
        assert cond.coef.shape == (1, 0)

    def test_overlap_rejected(self):
        with pytest.raises(DimMismatch):
            condition(np.zeros(2), np.eye(2), np.array([0]), np.array([0, 1]))

    def test_nested_equals_one_step(self):
        rng = np.random.default_rng(5)
        cov = random_spd(rng, 6)
        mean = rng.standard_normal(6)
        target = np.array([0, 1])
        ga, gb = np.array([2, 3]), np.array([4, 5])
        one_step = condition(mean, cov, target, np.concatenate([ga, gb]))
        # condition on A first, then on B within the reduced joint
        keep = np.concatenate([target, gb])
        inner = condition(mean, cov, keep, ga)
        values_a = rng.standard_normal(2)
        reduced_mean = inner.mean_given(values_a)
        two_step = condition(reduced_mean, inner.cov, np.array([0, 1]), np.array([2, 3]))
        assert np.abs(two_step.cov - one_step.cov).max() < 1e-10

    def test_conditional_mean_affine(self):
        rng = np.random.default_rng(8)
        cov = random_spd(rng, 3)
        mean = rng.standard_normal(3)
        cond = condition(mean, cov, np.array([0]), np.array([1, 2]))
        vals = rng.standard_normal(2)
        expected = mean[0] + cov[0, 1:] @ np.linalg.solve(cov[1:, 1:], vals - mean[1:])
        assert cond.mean_given(vals)[0] == pytest.approx(expected, abs=1e-10)

    @given(hst.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_extra_conditioning_never_increases_entropy(self, seed):
        rng = np.random.default_rng(seed)
        cov = random_spd(rng, 5)
        mean = np.zeros(5)
        target = np.array([0])
        small = condition(mean, cov, target, np.array([1, 2]))
        large = condition(mean, cov, target, np.array([1, 2, 3]))
        h_small = 0.5 * LOG_2PIE + 0.5 * chol_logdet(small.cov)
        h_large = 0.5 * LOG_2PIE + 0.5 * chol_logdet(large.cov)
        assert h_large <= h_small + 1e-12


class TestGaussianType:
    def test_dim_validation(self):
        with pytest.raises(DimMismatch):
            Gaussian(np.zeros(2), np.eye(3))

    def test_scalar_inputs_promoted(self):
        g = Gaussian(0.0, 2.0)
        assert g.dim == 1 and g.cov.shape == (1, 1)
