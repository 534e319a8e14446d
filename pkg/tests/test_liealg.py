import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lie_dmoc import (AngleNearPi, InertiaModel, NotPositiveDefinite, ad_star,
                      adjoint, coadjoint, curvature, exp_so3, hat,
                      inertia_apply, inertia_solve, log_so3,
                      orthogonality_error, pairing_norm_sq, vee)

finite3 = st.tuples(*[st.floats(-5.0, 5.0) for _ in range(3)]).map(np.array)


class TestHatVee:
    def test_hat_zero(self):
        assert np.array_equal(hat([0.0, 0.0, 0.0]), np.zeros((3, 3)))

    def test_hat_components(self):
        expected = np.array([[0.0, -3.0, 2.0],
                             [3.0, 0.0, -1.0],
                             [-2.0, 1.0, 0.0]])
        assert np.array_equal(hat([1.0, 2.0, 3.0]), expected)

    def test_hat_is_cross_product(self):
        u = np.array([1.0, 0.0, 0.0])
        w = np.array([0.0, 1.0, 0.0])
        assert np.array_equal(hat(u) @ w, np.array([0.0, 0.0, 1.0]))

    def test_hat_antisymmetric(self, rng):
        for v in rng.normal(size=(50, 3)):
            H = hat(v)
            assert np.array_equal(H + H.T, np.zeros((3, 3)))

    def test_vee_zero(self):
        assert np.array_equal(vee(np.zeros((3, 3))), np.zeros(3))

    def test_vee_roundtrip(self):
        v = np.array([4.0, -5.0, 6.0])
        assert np.array_equal(vee(hat(v)), v)

    def test_vee_component_convention(self):
        # antisymmetric S with S[2][1] = a has first component a
        a = 0.73
        S = hat([a, 0.0, 0.0])
        assert S[2][1] == a
        assert vee(S)[0] == a

    def test_vee_discards_symmetric_part(self, rng):
        S = rng.normal(size=(3, 3))
        anti = (S - S.T) / 2.0
        assert np.allclose(hat(vee(S)), anti, atol=0.0)

    @given(finite3)
    @settings(max_examples=200, deadline=None)
    def test_vee_hat_identity(self, v):
        assert np.array_equal(vee(hat(v)), v)


class TestExpLog:
    def test_exp_zero(self):
        assert np.array_equal(exp_so3(np.zeros(3)), np.eye(3))

    def test_exp_quarter_turn(self):
        expected = np.array([[0.0, -1.0, 0.0],
                             [1.0, 0.0, 0.0],
                             [0.0, 0.0, 1.0]])
        assert np.allclose(exp_so3([0.0, 0.0, np.pi / 2]), expected, atol=1e-15)

    def test_exp_planar_block(self):
        # rotation about z embeds the 2x2 rotation block
        for w in (0.3, -1.2, 2.5):
            R = exp_so3([0.0, 0.0, w])
            block = np.array([[np.cos(w), -np.sin(w)], [np.sin(w), np.cos(w)]])
            assert np.allclose(R[:2, :2], block, atol=1e-15)
            assert np.allclose(R[2], [0.0, 0.0, 1.0], atol=0.0)

    def test_exp_batched_matches_scalar(self, rng):
        vs = rng.normal(size=(10, 3))
        batch = exp_so3(vs)
        for i, v in enumerate(vs):
            assert np.array_equal(batch[i], exp_so3(v))

    def test_log_identity(self):
        assert np.array_equal(log_so3(np.eye(3)), np.zeros(3))

    def test_log_roundtrip(self):
        v = np.array([0.1, -0.2, 0.3])
        assert np.abs(log_so3(exp_so3(v)) - v).max() < 1e-12

    def test_log_axis_angle(self):
        v = log_so3(exp_so3([np.pi / 3, 0.0, 0.0]))
        assert np.allclose(v, [np.pi / 3, 0.0, 0.0], atol=1e-14)

    def test_log_norm_is_trace_angle(self, rng):
        for _ in range(50):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(1e-4, np.pi - 1e-3)
            R = exp_so3(angle * axis)
            theta = np.arccos(np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0))
            assert abs(np.linalg.norm(log_so3(R)) - theta) < 1e-9

    def test_log_tiny_angles(self):
        for angle in (0.0, 1e-12, 1e-9, 1e-7, 1e-5):
            v = angle * np.array([0.6, 0.8, 0.0])
            err = np.abs(log_so3(exp_so3(v)) - v).max()
            assert err < 1e-16 + 1e-10 * angle

    def test_log_near_pi_raises(self):
        with pytest.raises(AngleNearPi):
            log_so3(exp_so3([np.pi - 1e-7, 0.0, 0.0]))

    def test_log_just_below_margin_ok(self):
        v = (np.pi - 1e-3) * np.array([0.0, 1.0, 0.0])
        assert np.abs(log_so3(exp_so3(v)) - v).max() < 1e-10

    @given(st.floats(0.0, np.pi - 2e-6), finite3)
    @settings(max_examples=200, deadline=None)
    def test_exp_log_roundtrip(self, angle, direction):
        if np.linalg.norm(direction) < 1e-6:
            direction = np.array([1.0, 0.0, 0.0])
        v = angle * direction / np.linalg.norm(direction)
        R = exp_so3(v)
        assert np.abs(log_so3(R) - v).max() < 1e-10

    @given(finite3, st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_exp_homomorphism_commuting(self, v, a, b):
        lhs = exp_so3(a * v) @ exp_so3(b * v)
        rhs = exp_so3((a + b) * v)
        assert np.abs(lhs - rhs).max() < 1e-12

    @given(finite3)
    @settings(max_examples=200, deadline=None)
    def test_exp_stays_on_group(self, v):
        if np.linalg.norm(v) > 10.0:
            v = 10.0 * v / np.linalg.norm(v)
        R = exp_so3(v)
        assert orthogonality_error(R) < 1e-12
        assert abs(np.linalg.det(R) - 1.0) < 1e-12


class TestActions:
    def test_adjoint_identity(self, rng):
        v = rng.normal(size=3)
        assert np.array_equal(adjoint(np.eye(3), v), v)

    def test_adjoint_quarter_turn(self):
        R = exp_so3([0.0, 0.0, np.pi / 2])
        out = adjoint(R, [1.0, 0.0, 0.0])
        assert np.allclose(out, [0.0, 1.0, 0.0], atol=1e-15)

    def test_adjoint_matrix_form(self, rng):
        for _ in range(100):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            R = exp_so3(rng.uniform(0.0, 3.0) * axis)
            v = rng.normal(size=3)
            assert np.abs(vee(R @ hat(v) @ R.T) - adjoint(R, v)).max() < 1e-12

    def test_coadjoint_identity(self, rng):
        p = rng.normal(size=3)
        assert np.array_equal(coadjoint(np.eye(3), p), p)

    def test_coadjoint_duality(self, rng):
        for _ in range(100):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            R = exp_so3(rng.uniform(0.0, 3.0) * axis)
            p, v = rng.normal(size=(2, 3))
            assert abs(p @ adjoint(R, v) - coadjoint(R, p) @ v) < 1e-12

    def test_coadjoint_inverts_adjoint(self, rng):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        R = exp_so3(1.3 * axis)
        p = rng.normal(size=3)
        assert np.abs(coadjoint(R, adjoint(R, p)) - p).max() < 1e-14

    def test_ad_star_self(self, rng):
        u = rng.normal(size=3)
        assert np.array_equal(ad_star(u, u), np.zeros(3))

    def test_ad_star_example(self):
        out = ad_star([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        assert np.array_equal(out, [0.0, 0.0, -1.0])

    def test_ad_star_duality_thousand_samples(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            u, p, w = rng.uniform(-2.0, 2.0, (3, 3))
            assert abs(ad_star(u, p) @ w - p @ np.cross(u, w)) < 1e-12


class TestPairingAndCurvature:
    def test_pairing_zero(self):
        assert pairing_norm_sq(np.zeros(3)) == 0.0

    def test_pairing_example_and_trace(self):
        p = np.array([1.0, 2.0, 3.0])
        assert pairing_norm_sq(p) == 14.0
        assert abs(0.5 * np.trace(hat(p).T @ hat(p)) - 14.0) < 1e-12

    def test_pairing_scaling(self, rng):
        p = rng.normal(size=3)
        assert abs(pairing_norm_sq(2.0 * p) - 4.0 * pairing_norm_sq(p)) < 1e-12

    def test_curvature_zero_arguments(self, rng):
        v = rng.normal(size=3)
        z = np.zeros(3)
        assert np.array_equal(curvature(z, v, v), z)
        assert np.array_equal(curvature(v, z, v), z)
        assert np.array_equal(curvature(v, v, z), z)

    def test_curvature_parallel(self):
        out = curvature([1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0])
        assert np.array_equal(out, np.zeros(3))

    def test_curvature_quarter(self):
        out = curvature([1.0, 0, 0], [0, 1.0, 0], [1.0, 0, 0])
        assert np.array_equal(out, np.array([0.0, 0.25, 0.0]))


class TestInertiaModel:
    def test_identity_operator_doubles(self, rng):
        model = InertiaModel.from_operator_matrix(np.eye(3))
        v = rng.normal(size=3)
        assert np.allclose(inertia_apply(model, v), 2.0 * v, atol=0.0)

    def test_reference_classical_tensor(self, inertia):
        expected = np.array([[34.62, 7.80, 11.40],
                             [7.80, 31.62, -4.71],
                             [11.40, -4.71, 29.50]])
        assert np.abs(inertia.j_classical - expected).max() < 1e-12

    def test_matrix_vector_forms_agree(self, inertia, rng):
        # hat(Jc v) = J hat(v) + hat(v) J
        for _ in range(100):
            v = rng.normal(size=3)
            lhs = hat(inertia_apply(inertia, v))
            rhs = inertia.j_op @ hat(v) + hat(v) @ inertia.j_op
            assert np.abs(lhs - rhs).max() < 1e-12

    def test_solve_inverts_apply(self, inertia, rng):
        v = rng.normal(size=3)
        assert np.abs(inertia_solve(inertia, inertia_apply(inertia, v)) - v).max() < 1e-12

    def test_self_adjointness_thousand_samples(self, inertia):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            xi, om = rng.uniform(-2.0, 2.0, (2, 3))
            lhs = inertia_apply(inertia, xi) @ om
            rhs = inertia_apply(inertia, om) @ xi
            assert abs(lhs - rhs) < 1e-12

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            InertiaModel.from_operator_matrix(np.diag([1.0, -2.0, 3.0]))

    def test_rejects_asymmetric(self):
        m = np.eye(3)
        m[0, 1] = 0.5
        with pytest.raises(NotPositiveDefinite):
            InertiaModel.from_operator_matrix(m)


class TestComplexSupport:
    def test_exp_complex_matches_real_part(self, rng):
        v = rng.normal(size=3)
        Rc = exp_so3(v + 0j)
        assert np.array_equal(Rc.real, exp_so3(v))
        assert np.abs(Rc.imag).max() == 0.0

    def test_complex_step_through_exp_log(self):
        # d/dv0 of log(exp(v)) is the first basis vector
        v = np.array([0.1, -0.2, 0.3], dtype=complex)
        v[0] += 1e-100j
        col = np.imag(log_so3(exp_so3(v))) / 1e-100
        assert np.abs(col - [1.0, 0.0, 0.0]).max() < 1e-12
