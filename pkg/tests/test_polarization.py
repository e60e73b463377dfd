import cmath
import math

import numpy as np
import numpy.testing as npt
import pytest

from lunehbt.polarization import (
    IDENTITY,
    Frame,
    JonesVector,
    L,
    Linear,
    R,
    bargmann4,
    is_projector,
    ket,
    lune_solid_angle,
    mirror_conjugate,
    projector,
    tau,
    trace_product,
    wrap_phase,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def random_states(rng, n):
    states = []
    for _ in range(n):
        pick = rng.integers(0, 3)
        if pick == 0:
            states.append(R)
        elif pick == 1:
            states.append(L)
        else:
            states.append(Linear(rng.uniform(0.0, 2.0 * math.pi)))
    return states


class TestKet:
    def test_linear_zero_is_x_axis(self):
        npt.assert_allclose(ket(Linear(0.0)).array, [1.0, 0.0], atol=1e-15)

    def test_right_circular(self):
        npt.assert_allclose(ket(R).array, [INV_SQRT2, 1j * INV_SQRT2], atol=1e-15)

    def test_linear_half_pi_is_y_axis(self):
        npt.assert_allclose(ket(Linear(math.pi / 2)).array, [0.0, 1.0], atol=1e-15)

    def test_unit_norm(self):
        rng = np.random.default_rng(11)
        for state in random_states(rng, 50):
            assert ket(state).intensity() == pytest.approx(1.0, abs=1e-14)

    def test_frame_tag(self):
        assert ket(R).frame is Frame.XY
        assert ket(R, Frame.YZ).frame is Frame.YZ


class TestProjector:
    def test_right_circular_matrix(self):
        expected = 0.5 * np.array([[1.0, -1j], [1j, 1.0]])
        npt.assert_allclose(projector(R), expected, atol=1e-15)

    def test_linear_zero(self):
        npt.assert_allclose(projector(Linear(0.0)), [[1.0, 0.0], [0.0, 0.0]], atol=1e-15)

    def test_linear_quarter_pi_outer_product_oracle(self):
        # independent outer-product route written out by hand
        k = np.array([math.cos(math.pi / 4), math.sin(math.pi / 4)], dtype=complex)
        oracle = np.array(
            [[k[0] * k[0].conjugate(), k[0] * k[1].conjugate()],
             [k[1] * k[0].conjugate(), k[1] * k[1].conjugate()]]
        ).T
        npt.assert_allclose(projector(Linear(math.pi / 4)), oracle, atol=1e-15)
        npt.assert_allclose(projector(Linear(math.pi / 4)), 0.5 * np.ones((2, 2)), atol=1e-15)

    def test_tau_representation_oracle(self):
        # P_R = (1 + tau3)/2, P_L = (1 - tau3)/2,
        # P(t) = (1 + tau1 cos 2t + tau2 sin 2t)/2
        npt.assert_allclose(projector(R), 0.5 * (IDENTITY + tau(3)), atol=1e-15)
        npt.assert_allclose(projector(L), 0.5 * (IDENTITY - tau(3)), atol=1e-15)
        rng = np.random.default_rng(5)
        for t in rng.uniform(0.0, 2.0 * math.pi, size=25):
            expected = 0.5 * (
                IDENTITY + tau(1) * math.cos(2 * t) + tau(2) * math.sin(2 * t)
            )
            npt.assert_allclose(projector(Linear(t)), expected, atol=1e-14)

    def test_hermitian_idempotent_trace_one(self):
        rng = np.random.default_rng(3)
        for state in random_states(rng, 200):
            p = projector(state)
            assert is_projector(p, tol=1e-12)
            assert np.trace(p) == pytest.approx(1.0, abs=1e-12)

    def test_completeness(self):
        npt.assert_allclose(projector(R) + projector(L), IDENTITY, atol=1e-12)
        rng = np.random.default_rng(4)
        for t in rng.uniform(-5.0, 5.0, size=25):
            npt.assert_allclose(
                projector(Linear(t)) + projector(Linear(t + math.pi / 2)),
                IDENTITY,
                atol=1e-12,
            )


class TestTau:
    def test_values(self):
        npt.assert_array_equal(tau(1), [[1, 0], [0, -1]])
        npt.assert_array_equal(tau(2), [[0, 1], [1, 0]])
        npt.assert_array_equal(tau(3), [[0, -1j], [1j, 0]])

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_hermitian_unitary_traceless(self, i):
        t = tau(i)
        npt.assert_array_equal(t, t.conj().T)
        npt.assert_allclose(t @ t.conj().T, IDENTITY, atol=1e-15)
        assert np.trace(t) == 0

    @pytest.mark.parametrize("i", [0, 4, -1])
    def test_index_out_of_range(self, i):
        with pytest.raises(ValueError):
            tau(i)


class TestTraceProduct:
    def test_circular_linear_overlap(self):
        rng = np.random.default_rng(8)
        for t in rng.uniform(0.0, 2.0 * math.pi, size=20):
            got = trace_product([projector(R), projector(Linear(t))])
            assert got == pytest.approx(0.5, abs=1e-12)
            got = trace_product([projector(L), projector(Linear(t))])
            assert got == pytest.approx(0.5, abs=1e-12)

    def test_four_projectors_equal_angles(self):
        got = trace_product(
            [projector(R), projector(Linear(0.7)), projector(L), projector(Linear(0.7))]
        )
        assert got == pytest.approx(0.25, abs=1e-12)

    def test_four_projectors_frozen_value(self):
        # quarter of exp(-2 pi i / 3): (-1/8, -sqrt(3)/8)
        expected = complex(-0.125, -0.21650635094610965)
        got = trace_product(
            [projector(R), projector(Linear(math.pi / 3)), projector(L), projector(Linear(0.0))]
        )
        assert abs(got - expected) < 1e-12

    def test_constant_modulus_quarter(self):
        rng = np.random.default_rng(9)
        for t3, t4 in rng.uniform(0.0, 2.0 * math.pi, size=(50, 2)):
            got = trace_product(
                [projector(R), projector(Linear(t3)), projector(L), projector(Linear(t4))]
            )
            assert abs(got) == pytest.approx(0.25, abs=1e-12)

    def test_cyclic_invariance(self):
        rng = np.random.default_rng(10)
        mats = [
            rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(5)
        ]
        base = trace_product(mats)
        for shift in range(1, len(mats)):
            rotated = mats[shift:] + mats[:shift]
            assert abs(trace_product(rotated) - base) < 1e-12 * max(1.0, abs(base))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            trace_product([])


class TestBargmann:
    def test_circular_linear_chain(self):
        rng = np.random.default_rng(12)
        for t3, t4 in rng.uniform(0.0, 2.0 * math.pi, size=(50, 2)):
            got = bargmann4(R, Linear(t3), L, Linear(t4))
            expected = 0.25 * cmath.exp(-2j * (t3 - t4))
            assert abs(got - expected) < 1e-12

    def test_all_equal_states(self):
        assert bargmann4(R, R, R, R) == pytest.approx(1.0, abs=1e-12)

    def test_frozen_value(self):
        got = bargmann4(R, Linear(0.0), L, Linear(math.pi / 4))
        assert abs(got - 0.25j) < 1e-12

    def test_orthogonal_adjacent_states_vanish(self):
        assert abs(bargmann4(R, L, R, L)) < 1e-12
        assert abs(bargmann4(Linear(0.0), Linear(math.pi / 2), R, L)) < 1e-12

    def test_matches_projector_trace(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            states = random_states(rng, 4)
            lhs = bargmann4(*states)
            rhs = trace_product([projector(s) for s in states])
            assert abs(lhs - rhs) < 1e-12


class TestLuneSolidAngle:
    def test_quarter_pi(self):
        assert lune_solid_angle(math.pi / 4, 0.0) == pytest.approx(math.pi, abs=1e-15)

    def test_coincident_meridians(self):
        assert lune_solid_angle(1.234, 1.234) == 0.0

    def test_signed_value(self):
        assert lune_solid_angle(0.0, math.pi / 2) == pytest.approx(-2.0 * math.pi, abs=1e-15)

    def test_phase_consistency(self):
        rng = np.random.default_rng(14)
        for t3, t4 in rng.uniform(0.0, 2.0 * math.pi, size=(200, 2)):
            phase = cmath.phase(bargmann4(R, Linear(t3), L, Linear(t4)))
            omega = lune_solid_angle(t3, t4)
            assert abs(wrap_phase(phase + omega / 2.0)) < 1e-12


class TestMirrorConjugate:
    def test_swaps_circular_projectors(self):
        npt.assert_allclose(mirror_conjugate(projector(R)), projector(L), atol=1e-12)
        npt.assert_allclose(mirror_conjugate(projector(L)), projector(R), atol=1e-12)

    def test_reflects_linear_angle(self):
        rng = np.random.default_rng(15)
        for t in rng.uniform(0.0, 2.0 * math.pi, size=25):
            npt.assert_allclose(
                mirror_conjugate(projector(Linear(t))),
                projector(Linear(math.pi / 2 - t)),
                atol=1e-12,
            )

    def test_identity_fixed(self):
        npt.assert_allclose(mirror_conjugate(IDENTITY), IDENTITY, atol=1e-15)

    def test_involution(self):
        rng = np.random.default_rng(16)
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        npt.assert_allclose(mirror_conjugate(mirror_conjugate(m)), m, atol=1e-12)


class TestStatesAndVectors:
    def test_linear_equality_mod_pi(self):
        assert Linear(0.3) == Linear(0.3 + math.pi)
        assert Linear(0.3) == Linear(0.3 - 7 * math.pi)
        assert Linear(0.3) != Linear(0.4)
        assert Linear(0.25).canonical_angle == pytest.approx(0.25)
        assert Linear(0.25 + math.pi).canonical_angle == pytest.approx(0.25)

    def test_jones_vector_is_immutable(self):
        v = JonesVector(1.0, 2.0j, Frame.YZ)
        with pytest.raises(AttributeError):
            v.frame = Frame.XY

    def test_intensity(self):
        assert JonesVector(3.0, 4.0j).intensity() == pytest.approx(25.0)

    def test_wrap_phase_branch(self):
        assert wrap_phase(math.pi) == pytest.approx(math.pi)
        assert wrap_phase(-math.pi) == pytest.approx(math.pi)
        assert wrap_phase(3 * math.pi) == pytest.approx(math.pi)
        assert wrap_phase(0.1 + 4 * math.pi) == pytest.approx(0.1)
