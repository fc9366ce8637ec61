import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvsteer import (
    CovMatrix,
    LocalSymplectic,
    NotPositiveDefinite,
    NotSymmetric,
    SingularParams,
    StandardForm,
    SymplecticParams,
    UnphysicalState,
    apply_local,
    cm_from_json_dict,
    cm_to_json_dict,
    local_invariants,
    swap_parties,
    symplectic_eigenvalues,
    symplectic_from_params,
    tmsv,
    to_standard_form,
    validate_bona_fide,
    vacuum,
)
from conftest import random_local_symplectic


class TestValidateBonaFide:
    def test_vacuum_is_valid(self):
        cm = validate_bona_fide(np.eye(4))
        assert isinstance(cm, CovMatrix)
        np.testing.assert_array_equal(cm.matrix, np.eye(4))

    def test_half_identity_is_unphysical(self):
        # eigenvalues of 0.5*I + i*Omega are 0.5 +- 1 per mode
        with pytest.raises(UnphysicalState) as err:
            validate_bona_fide(0.5 * np.eye(4))
        assert err.value.min_eigenvalue == pytest.approx(-0.5, abs=1e-12)

    def test_tmsv_is_valid(self):
        cm = tmsv(1.0).cm
        nu1, nu2 = symplectic_eigenvalues(cm)
        assert nu1 == pytest.approx(1.0, abs=1e-10)
        assert nu2 == pytest.approx(1.0, abs=1e-10)

    def test_asymmetric_rejected(self):
        m = np.eye(4)
        m[0, 1] = 1e-6
        with pytest.raises(NotSymmetric):
            validate_bona_fide(m)

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            validate_bona_fide(np.eye(3))

    def test_block_accessors_partition(self):
        cm = tmsv(0.7).cm
        m = cm.matrix
        np.testing.assert_array_equal(cm.block_a, m[:2, :2])
        np.testing.assert_array_equal(cm.block_b, m[2:, 2:])
        np.testing.assert_array_equal(cm.block_c, m[:2, 2:])

    def test_matches_symplectic_spectrum_on_random_matrices(self, rng):
        # acceptance of sigma + i*Omega >= 0 must coincide with nu >= 1
        agree = 0
        for _ in range(1000):
            w = rng.normal(size=(4, 4))
            m = w @ w.T / 4.0 + 0.3 * np.eye(4)
            nu1, nu2 = symplectic_eigenvalues(m)
            physical = min(nu1, nu2) >= 1.0 - 1e-10
            try:
                validate_bona_fide(m)
                accepted = True
            except UnphysicalState:
                accepted = False
            assert accepted == physical
            agree += 1
        assert agree == 1000


class TestSymplecticFromParams:
    def test_trivial_params_give_identity(self):
        s = symplectic_from_params(SymplecticParams(0.0, 0.0, 1.0))
        np.testing.assert_allclose(s, np.eye(2), atol=1e-15)

    def test_sweep_parametrization_shape(self):
        # u = v/(1+v^2), w = 1+v^2 collapses to [[1, v], [v, 1+v^2]]
        v = 0.16
        s = symplectic_from_params(SymplecticParams(v / (1 + v * v), v, 1 + v * v))
        np.testing.assert_allclose(s, [[1.0, v], [v, 1 + v * v]], atol=1e-14)
        assert np.linalg.det(s) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(
        u=st.floats(-3, 3),
        v=st.floats(-3, 3),
        w=st.floats(0.1, 3),
    )
    def test_determinant_is_one(self, u, v, w):
        if abs(1 - u * v) < 1e-3:
            return
        s = symplectic_from_params(SymplecticParams(u, v, w))
        assert np.linalg.det(s) == pytest.approx(1.0, abs=1e-12)

    def test_seeded_random_determinants(self):
        rng = np.random.default_rng(1)
        checked = 0
        while checked < 1000:
            u, v, w = rng.uniform(-2, 2, 3)
            if abs(1 - u * v) < 1e-3 or abs(w) < 1e-3:
                continue
            s = symplectic_from_params(SymplecticParams(u, v, w))
            assert abs(np.linalg.det(s) - 1.0) < 1e-12
            checked += 1

    @pytest.mark.parametrize("u,v,w", [(1.0, 1.0, 1.0), (2.0, 0.5, 1.0), (0.1, 0.1, 0.0)])
    def test_singular_params_rejected(self, u, v, w):
        with pytest.raises(SingularParams):
            SymplecticParams(u, v, w)


class TestApplyLocal:
    def test_identity_preserves(self):
        cm = tmsv(0.4).cm
        out = apply_local(cm, LocalSymplectic.identity())
        np.testing.assert_allclose(out.matrix, cm.matrix, atol=1e-15)

    def test_vacuum_stays_pure(self, rng):
        cm = vacuum().cm
        for _ in range(50):
            s = random_local_symplectic(rng)
            out = apply_local(cm, s)
            nu1, nu2 = symplectic_eigenvalues(out)
            assert nu1 == pytest.approx(1.0, abs=1e-9)
            assert nu2 == pytest.approx(1.0, abs=1e-9)

    def test_invariants_preserved(self, rng):
        from cvsteer import random_cm

        for seed in range(200):
            cm = random_cm(seed).cm
            before = np.array(local_invariants(cm))
            after = np.array(local_invariants(apply_local(cm, random_local_symplectic(rng))))
            np.testing.assert_allclose(after, before, rtol=1e-9, atol=1e-9)


class TestLocalInvariants:
    def test_vacuum(self):
        np.testing.assert_allclose(local_invariants(vacuum().cm), (1, 1, 0, 1), atol=1e-14)

    @pytest.mark.parametrize("r", [0.3, 1.0, 1.7])
    def test_tmsv(self, r):
        det_a, det_b, det_c, det_full = local_invariants(tmsv(r).cm)
        assert det_a == pytest.approx(np.cosh(2 * r) ** 2, rel=1e-12)
        assert det_b == pytest.approx(np.cosh(2 * r) ** 2, rel=1e-12)
        assert det_c == pytest.approx(-np.sinh(2 * r) ** 2, rel=1e-12)
        assert det_full == pytest.approx(1.0, rel=1e-9)


class TestStandardForm:
    def test_already_standard_is_fixed_point(self):
        cm = tmsv(1.0).cm
        sf, s = to_standard_form(cm)
        assert sf.a == pytest.approx(np.cosh(2.0), rel=1e-12)
        assert sf.c1 == pytest.approx(np.sinh(2.0), rel=1e-12)
        assert sf.c2 == pytest.approx(-np.sinh(2.0), rel=1e-12)
        np.testing.assert_allclose(s.s_a, np.eye(2), atol=1e-9)
        np.testing.assert_allclose(s.s_b, np.eye(2), atol=1e-9)

    def test_rotated_tmsv_recovers_hyperbolics(self, rng):
        r = 0.8
        rotated = apply_local(tmsv(r).cm, random_local_symplectic(rng))
        sf, _ = to_standard_form(rotated)
        assert sf.a == pytest.approx(np.cosh(1.6), rel=1e-9)
        assert sf.b == pytest.approx(np.cosh(1.6), rel=1e-9)
        assert sf.c1 == pytest.approx(np.sinh(1.6), rel=1e-9)
        assert sf.c2 == pytest.approx(-np.sinh(1.6), rel=1e-9)

    def test_round_trip_on_random_states(self, rng):
        from cvsteer import random_cm

        for seed in range(200):
            cm = random_cm(seed).cm
            sf, s = to_standard_form(cm)
            reconstructed = apply_local(cm, s)
            np.testing.assert_allclose(
                reconstructed.matrix, sf.cm().matrix, atol=1e-9
            )
            assert sf.c1 >= abs(sf.c2) - 1e-9
            # invariant consistency
            det_a, det_b, det_c, _ = local_invariants(cm)
            assert sf.a == pytest.approx(np.sqrt(det_a), rel=1e-9)
            assert sf.b == pytest.approx(np.sqrt(det_b), rel=1e-9)
            assert sf.c1 * sf.c2 == pytest.approx(det_c, rel=1e-8, abs=1e-9)

    def test_zero_correlation_degenerates_gracefully(self):
        cm = validate_bona_fide(np.diag([2.0, 2.0, 3.0, 3.0]))
        sf, s = to_standard_form(cm)
        assert sf.c1 == 0.0 and sf.c2 == 0.0
        np.testing.assert_allclose(s.s_a @ s.s_a.T, np.eye(2), atol=1e-12)

    def test_standard_form_type_checks_convention(self):
        with pytest.raises(ValueError):
            StandardForm(a=2.0, b=2.0, c1=0.1, c2=1.0)
        with pytest.raises(UnphysicalState):
            StandardForm(a=0.5, b=2.0, c1=0.0, c2=0.0)


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        assert symplectic_eigenvalues(vacuum().cm) == pytest.approx((1.0, 1.0), abs=1e-12)

    def test_thermal(self):
        assert symplectic_eigenvalues(2.0 * np.eye(4)) == pytest.approx((2.0, 2.0), abs=1e-12)

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.0, 3.0])
    def test_tmsv_is_pure(self, r):
        nu1, nu2 = symplectic_eigenvalues(tmsv(r).cm)
        assert nu1 == pytest.approx(1.0, abs=1e-9)
        assert nu2 == pytest.approx(1.0, abs=1e-9)

    def test_not_positive_definite_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            symplectic_eigenvalues(np.diag([1.0, 1.0, 1.0, -1.0]))
        with pytest.raises(NotPositiveDefinite):
            symplectic_eigenvalues(np.arange(16.0).reshape(4, 4))


class TestSwapParties:
    def test_involution(self):
        cm = tmsv(0.9).cm
        np.testing.assert_array_equal(swap_parties(swap_parties(cm)).matrix, cm.matrix)

    def test_blocks_swap(self):
        from cvsteer import noisy_tmsv

        cm = noisy_tmsv(0.5, 1.0, 0.0).cm
        swapped = swap_parties(cm)
        np.testing.assert_array_equal(swapped.block_a, cm.block_b)
        np.testing.assert_array_equal(swapped.block_b, cm.block_a)


class TestJsonSchema:
    def test_round_trip(self):
        cm = tmsv(0.6).cm
        data = json.loads(json.dumps(cm_to_json_dict(cm, mean=[0.1, 0, 0, 0])))
        loaded, mean = cm_from_json_dict(data)
        np.testing.assert_allclose(loaded.matrix, cm.matrix)
        np.testing.assert_allclose(mean, [0.1, 0, 0, 0])

    def test_default_mean_is_zero(self):
        _, mean = cm_from_json_dict({"cm": np.eye(4).tolist()})
        np.testing.assert_array_equal(mean, np.zeros(4))

    def test_foreign_convention_rejected(self):
        with pytest.raises(ValueError, match="convention"):
            cm_from_json_dict({"cm": np.eye(4).tolist(), "convention": "hbar=2"})

    def test_missing_cm_rejected(self):
        with pytest.raises(ValueError):
            cm_from_json_dict({"mean": [0, 0, 0, 0]})
