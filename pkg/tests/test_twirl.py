import numpy as np
import pytest
from numpy.testing import assert_allclose

from wernerent.linalg import haar_unitaries
from wernerent.states import (
    PureState,
    WernerSpec,
    density_from_pure,
    flip_expectation,
    random_density,
    werner_density,
    werner_matrix,
)
from wernerent.twirl import (
    conjugate_uu,
    frobenius_residual,
    twirl_exact,
    twirl_monte_carlo,
    verify_pure_twirl,
)


def ket00():
    phi = np.zeros((2, 2))
    phi[0, 0] = 1
    return PureState(2, phi)


def optimal_state(d, f):
    root = np.sqrt(1 - f * f)
    phi = np.zeros((d, d))
    phi[0, 1] = np.sqrt((1 - root) / 2)
    phi[1, 0] = -np.sqrt((1 + root) / 2)
    return PureState(d, phi)


class TestTwirlExact:
    def test_werner_fixed(self):
        assert twirl_exact(werner_density(WernerSpec(3, -0.5))) == WernerSpec(3, -0.5)

    def test_product_state(self):
        assert twirl_exact(density_from_pure(ket00())) == WernerSpec(2, 1.0)

    def test_singlet(self):
        singlet = werner_density(WernerSpec(2, -1.0))
        spec = twirl_exact(singlet)
        assert spec.d == 2 and abs(spec.f - flip_expectation(singlet)) < 1e-15 and spec.f == -1.0

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_projection_round_trip(self, d):
        for f in np.linspace(-1, 1, 9):
            assert abs(twirl_exact(werner_density(WernerSpec(d, f))).f - f) < 1e-12

    @pytest.mark.parametrize("d", [2, 3])
    def test_idempotent(self, d, rng):
        for _ in range(5):
            once = twirl_exact(random_density(d, rng))
            twice = twirl_exact(werner_density(once))
            assert abs(once.f - twice.f) < 1e-12


class TestMonteCarlo:
    def test_werner_input_is_fixed_point(self):
        rho = werner_density(WernerSpec(3, 0.2))
        for n in (1, 7, 100):
            est = twirl_monte_carlo(rho, n, seed=1)
            assert np.max(np.abs(est.mean - rho.matrix)) < 1e-12

    def test_single_sample(self):
        rho = random_density(2, 5)
        est = twirl_monte_carlo(rho, 1, seed=0)
        assert est.samples == 1 and np.isnan(est.frob_stderr)
        assert abs(np.trace(est.mean) - 1) < 1e-10
        assert np.linalg.eigvalsh(est.mean)[0] >= -1e-9

    def test_product_state_converges(self):
        est = twirl_monte_carlo(density_from_pure(ket00()), 10_000, seed=11)
        dist = np.linalg.norm(est.mean - werner_matrix(2, 1.0))
        assert dist <= 5 * est.frob_stderr
        assert abs(np.trace(est.mean) - 1) < 1e-10

    def test_deterministic(self):
        rho = random_density(2, 3)
        a = twirl_monte_carlo(rho, 500, seed=42)
        b = twirl_monte_carlo(rho, 500, seed=42)
        assert np.array_equal(a.mean, b.mean) and a.frob_stderr == b.frob_stderr

    def test_batches_are_independent_of_each_other(self):
        # a batch only depends on its own spawned generator
        rho = random_density(2, 3)
        n, nb = 400, 20
        est = twirl_monte_carlo(rho, n, seed=8, n_batches=nb)
        children = np.random.default_rng(8).spawn(nb)
        parts = [conjugate_uu(rho.matrix, haar_unitaries(n // nb, 2, g)).sum(axis=0)
                 for g in reversed(children)]
        assert np.linalg.norm(sum(parts) / n - est.mean) < 1e-10

    @pytest.mark.parametrize("d", [2, 3])
    def test_samples_preserve_trace_and_positivity(self, d, rng):
        rho = random_density(d, rng)
        conj = conjugate_uu(rho.matrix, haar_unitaries(50, d, rng))
        assert np.max(np.abs(np.trace(conj, axis1=1, axis2=2) - 1)) < 1e-10
        assert np.linalg.eigvalsh(conj).min() >= -1e-9

    @pytest.mark.parametrize("d", [2, 3])
    def test_random_states_converge(self, d, rng):
        for _ in range(10):
            rho = random_density(d, rng)
            est = twirl_monte_carlo(rho, 10_000, seed=rng)
            assert frobenius_residual(est, twirl_exact(rho)) < 5 * est.frob_stderr

    def test_invalid_sample_count(self):
        with pytest.raises(ValueError):
            twirl_monte_carlo(random_density(2, 0), 0)


class TestPureTwirl:
    def test_optimal_state(self):
        spec, dist = verify_pure_twirl(optimal_state(3, -0.6), seed=0)
        assert spec.d == 3 and abs(spec.f + 0.6) < 1e-12
        assert dist < 0.05

    def test_product_state_is_separable_boundary(self):
        phi = np.zeros((2, 2))
        phi[0, 1] = 1
        spec, _ = verify_pure_twirl(PureState(2, phi), n_samples=200, seed=0)
        assert spec == WernerSpec(2, 0.0)

    @pytest.mark.parametrize("d", [2, 3])
    def test_maximally_entangled(self, d):
        spec, _ = verify_pure_twirl(PureState(d, np.eye(d) / np.sqrt(d)), n_samples=100, seed=0)
        assert spec.d == d and abs(spec.f - 1) < 1e-12

    def test_estimate_flip_value(self):
        est = twirl_monte_carlo(density_from_pure(optimal_state(2, -0.3)), 300, seed=2)
        assert abs(est.f_estimate + 0.3) < 1e-10
