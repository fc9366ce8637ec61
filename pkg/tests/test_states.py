import json

import numpy as np
import pytest

from cvsteer import (
    CovMatrix,
    GaussianMixtureSpec,
    GaussianStateSpec,
    gaussian_steering_a_to_b,
    gaussian_steering_b_to_a,
    local_invariants,
    mixture_cm,
    noisy_tmsv,
    random_cm,
    state_from_json_dict,
    state_to_json_dict,
    symplectic_eigenvalues,
    tmsv,
    transform_mixture,
    transform_state,
    vacuum,
)
from conftest import random_local_symplectic


class TestVacuum:
    def test_identity_cm_zero_mean(self):
        v = vacuum()
        np.testing.assert_array_equal(v.cm.matrix, np.eye(4))
        np.testing.assert_array_equal(v.mean, np.zeros(4))

    def test_unsteerable(self):
        assert gaussian_steering_a_to_b(vacuum().cm) == 0.0


class TestTmsv:
    def test_zero_squeezing_is_vacuum(self):
        np.testing.assert_array_equal(tmsv(0.0).cm.matrix, np.eye(4))

    def test_entries(self):
        cm = tmsv(1.0).cm.matrix
        assert cm[0, 0] == pytest.approx(np.cosh(2.0), rel=1e-15)
        assert cm[0, 2] == pytest.approx(np.sinh(2.0), rel=1e-15)
        assert cm[1, 3] == pytest.approx(-np.sinh(2.0), rel=1e-15)

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    def test_purity(self, r):
        _, _, _, det_full = local_invariants(tmsv(r).cm)
        assert det_full == pytest.approx(1.0, abs=1e-10)

    def test_negative_squeezing_rejected(self):
        with pytest.raises(ValueError):
            tmsv(-0.1)


class TestNoisyTmsv:
    def test_no_noise_reduces_to_tmsv(self):
        np.testing.assert_array_equal(noisy_tmsv(0.8, 0.0, 0.0).cm.matrix, tmsv(0.8).cm.matrix)

    def test_one_sided_noise_is_asymmetric(self):
        cm = noisy_tmsv(1.0, 0.5, 0.0).cm
        assert gaussian_steering_a_to_b(cm) != pytest.approx(
            gaussian_steering_b_to_a(cm), abs=1e-6
        )

    def test_heavy_noise_kills_steering(self):
        cm = noisy_tmsv(0.3, 5.0, 5.0).cm
        assert gaussian_steering_a_to_b(cm) == 0.0
        assert gaussian_steering_b_to_a(cm) == 0.0

    def test_negative_noise_rejected(self):
        with pytest.raises(ValueError):
            noisy_tmsv(0.5, -1.0, 0.0)


class TestRandomCm:
    def test_always_bona_fide(self):
        # constructing the state already validates; run a large sweep
        for seed in range(10_000):
            random_cm(seed)

    def test_thermal_spectrum_round_trip(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            nu = np.sort(rng.uniform(1.0, 3.0, size=2))[::-1]
            got = symplectic_eigenvalues(random_cm(seed).cm)
            np.testing.assert_allclose(got, nu, rtol=1e-9)

    def test_pure_limit(self):
        cm = random_cm(11, max_thermal=1.0).cm
        _, _, _, det_full = local_invariants(cm)
        assert det_full == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_per_seed(self):
        np.testing.assert_array_equal(random_cm(123).cm.matrix, random_cm(123).cm.matrix)

    def test_bad_thermal_bound_rejected(self):
        with pytest.raises(ValueError):
            random_cm(0, max_thermal=0.5)


class TestMixture:
    def test_single_component_is_its_own_cm(self):
        spec = tmsv(0.5)
        mix = GaussianMixtureSpec(((1.0, spec),))
        np.testing.assert_allclose(mixture_cm(mix).matrix, spec.cm.matrix, atol=1e-15)

    def test_displaced_vacua_closed_form(self):
        d = 1.3
        mix = GaussianMixtureSpec(
            (
                (0.5, GaussianStateSpec(CovMatrix(np.eye(4)), np.array([d, 0, 0, 0]))),
                (0.5, GaussianStateSpec(CovMatrix(np.eye(4)), np.array([-d, 0, 0, 0]))),
            )
        )
        expected = np.eye(4) + np.diag([d * d, 0, 0, 0])
        np.testing.assert_allclose(mixture_cm(mix).matrix, expected, atol=1e-12)

    def test_equal_weight_cm_mixing(self):
        mix = GaussianMixtureSpec(((0.5, tmsv(0.5)), (0.5, vacuum())))
        expected = 0.5 * (tmsv(0.5).cm.matrix + np.eye(4))
        np.testing.assert_allclose(mixture_cm(mix).matrix, expected, atol=1e-15)

    def test_identical_components_collapse(self):
        spec = tmsv(0.7)
        mix = GaussianMixtureSpec(((0.25, spec), (0.25, spec), (0.5, spec)))
        np.testing.assert_allclose(mixture_cm(mix).matrix, spec.cm.matrix, atol=1e-15)

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            GaussianMixtureSpec(((0.7, vacuum()), (0.2, vacuum())))
        with pytest.raises(ValueError):
            GaussianMixtureSpec(((1.5, vacuum()), (-0.5, vacuum())))
        with pytest.raises(ValueError):
            GaussianMixtureSpec(())


class TestTransforms:
    def test_state_transform_moves_cm_and_mean(self, rng):
        spec = GaussianStateSpec(tmsv(0.5).cm, np.array([1.0, 0.0, -1.0, 0.5]))
        s = random_local_symplectic(rng)
        moved = transform_state(spec, s)
        full = s.matrix()
        np.testing.assert_allclose(moved.mean, full @ spec.mean, atol=1e-12)
        np.testing.assert_allclose(
            moved.cm.matrix, full @ spec.cm.matrix @ full.T, atol=1e-12
        )

    def test_mixture_transform_commutes_with_effective_cm(self, rng):
        mix = GaussianMixtureSpec(
            (
                (0.4, GaussianStateSpec(tmsv(0.3).cm, np.array([2.0, 0, 2.0, 0]))),
                (0.6, GaussianStateSpec(vacuum().cm, np.array([-1.0, 0, -1.0, 0]))),
            )
        )
        s = random_local_symplectic(rng)
        full = s.matrix()
        direct = full @ mixture_cm(mix).matrix @ full.T
        np.testing.assert_allclose(
            mixture_cm(transform_mixture(mix, s)).matrix, direct, atol=1e-10
        )


class TestStateJson:
    def test_gaussian_round_trip(self):
        spec = GaussianStateSpec(tmsv(0.9).cm, np.array([0.5, 0, 0, 0]))
        data = json.loads(json.dumps(state_to_json_dict(spec)))
        loaded = state_from_json_dict(data)
        assert isinstance(loaded, GaussianStateSpec)
        np.testing.assert_allclose(loaded.cm.matrix, spec.cm.matrix)
        np.testing.assert_allclose(loaded.mean, spec.mean)

    def test_mixture_round_trip(self):
        mix = GaussianMixtureSpec(
            (
                (0.3, GaussianStateSpec(vacuum().cm, np.array([1.0, 0, 1.0, 0]))),
                (0.7, tmsv(0.4)),
            )
        )
        loaded = state_from_json_dict(json.loads(json.dumps(state_to_json_dict(mix))))
        assert isinstance(loaded, GaussianMixtureSpec)
        np.testing.assert_allclose(
            mixture_cm(loaded).matrix, mixture_cm(mix).matrix, atol=1e-12
        )

    def test_component_without_weight_rejected(self):
        with pytest.raises(ValueError):
            state_from_json_dict({"components": [{"cm": np.eye(4).tolist()}]})
