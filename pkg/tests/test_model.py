import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zenotransfer import (
    DotAmplitudes,
    MeasurementProtocol,
    ParameterError,
    PhysParams,
    asymptotic_conditional_occupation,
    dark_state_residual,
    discretize,
    mixing_angle,
    validate_params,
)


class TestValidateParams:
    def test_accepts_reference_point(self):
        p = PhysParams(0.0, 0.0, 1.0, 1.0, 3.0)
        assert validate_params(p) is p

    def test_zero_bandwidth(self):
        with pytest.raises(ParameterError, match="bandwidth must be positive"):
            PhysParams(bandwidth=0.0)

    def test_negative_width(self):
        with pytest.raises(ParameterError, match="gamma1: width must be nonnegative"):
            PhysParams(gamma1=-0.5)

    def test_nonfinite(self):
        with pytest.raises(ParameterError, match="e2"):
            PhysParams(e2=math.nan)

    def test_band_offset(self):
        assert PhysParams.aligned(9.0, 1.0, 3.0).band_offset == 3.0
        assert PhysParams(c=0.5).band_offset == 0.5


class TestMixingAngle:
    def test_no_asymmetry(self):
        m = mixing_angle(0.0)
        assert (m.cos_beta, m.sin_beta) == (1.0, 0.0)

    def test_symmetric(self):
        m = mixing_angle(1.0)
        assert m.cos_beta == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert m.sin_beta == pytest.approx(1 / math.sqrt(2), abs=1e-15)

    def test_gamma_two(self):
        m = mixing_angle(2.0)
        assert m.cos_beta == pytest.approx(1 / math.sqrt(5), abs=1e-12)
        assert m.sin_beta == pytest.approx(2 / math.sqrt(5), abs=1e-12)
        assert m.cos_beta == pytest.approx(0.4472135955, abs=1e-10)
        assert m.sin_beta == pytest.approx(0.8944271910, abs=1e-10)

    def test_negative_rejected(self):
        with pytest.raises(ParameterError):
            mixing_angle(-1.0)

    @given(st.floats(0.0, 1e6))
    def test_unit_norm(self, gamma):
        m = mixing_angle(gamma)
        assert abs(m.cos_beta**2 + m.sin_beta**2 - 1) < 1e-12
        assert 0 <= m.cos_beta <= 1 and 0 <= m.sin_beta <= 1

    def test_rotation_round_trip(self):
        m = mixing_angle(0.7)
        amps = DotAmplitudes(0.3 + 0.1j, -0.5j)
        back = m.from_rotated(*m.to_rotated(amps))
        assert back.b1 == pytest.approx(amps.b1) and back.b2 == pytest.approx(amps.b2)


class TestProtocol:
    def test_from_x_lands_on_t_total(self):
        pr = MeasurementProtocol.from_x(2.0, 4.0, 3.0)
        assert pr.n == 6
        assert pr.n * pr.tau == pytest.approx(pr.t_total, rel=1e-12)
        assert pr.x == pytest.approx(3.0 * pr.tau)

    def test_rounding_adjusts_x(self):
        pr = MeasurementProtocol.from_x(0.7, 1.0, 3.0)
        assert pr.n == 4 and pr.x == pytest.approx(0.75)

    def test_at_least_one_measurement(self):
        assert MeasurementProtocol.from_x(100.0, 1.0, 3.0).n == 1

    def test_no_measurement(self):
        pr = MeasurementProtocol(0, 2.0, 3.0)
        assert math.isinf(pr.tau) and math.isinf(pr.x)
        assert list(pr.times) == [0.0, 2.0]

    def test_rejects_nonpositive_x(self):
        with pytest.raises(ParameterError, match="x must be positive"):
            MeasurementProtocol.from_x(0.0, 1.0, 3.0)


class TestDarkStateResidual:
    @pytest.mark.parametrize("n_modes", [51, 201, 1001])
    def test_symmetric_exact(self, n_modes):
        res = discretize(PhysParams.aligned(0.0, 1.0, 3.0), n_modes)
        h_norm = np.linalg.norm(res.hamiltonian(), 2)
        assert dark_state_residual(res, 1.0) < 1e-10 * h_norm

    def test_asymmetric_exact(self):
        res = discretize(PhysParams(0.0, 0.0, 4.0, 1.0, 3.0), 101)
        assert dark_state_residual(res, 2.0) < 1e-10

    def test_mismatched_gamma(self):
        res = discretize(PhysParams(0.0, 0.0, 4.0, 1.0, 3.0), 101)
        with pytest.raises(ParameterError, match="coupling ratio"):
            dark_state_residual(res, 1.0)

    def test_perturbation_is_linear(self):
        res = discretize(PhysParams.aligned(0.0, 1.0, 3.0), 201)
        rng = np.random.default_rng(7)
        direction = rng.standard_normal(res.n_modes)

        def perturbed(eps):
            g = np.array(res.couplings)
            g[0] *= 1 + eps * direction
            return replace(res, couplings=g)

        r1 = dark_state_residual(perturbed(1e-3), 1.0)
        r2 = dark_state_residual(perturbed(2e-3), 1.0)
        # direct evaluation of the leaked reservoir amplitude cos(beta) * delta g
        direct = np.linalg.norm(res.couplings[0] * 1e-3 * direction) / math.sqrt(2)
        assert r1 > 0
        assert r1 == pytest.approx(direct, rel=1e-9)
        assert r2 / r1 == pytest.approx(2.0, rel=1e-9)


class TestAsymptoticOccupation:
    def test_symmetric_from_dot_one(self):
        assert asymptotic_conditional_occupation(1.0, DotAmplitudes(1, 0)) == pytest.approx((0.5, 0.5))

    def test_complex_initial(self):
        ini = DotAmplitudes((1 - 1j) / 2, (1 + 1j) / 2)
        assert asymptotic_conditional_occupation(1.0, ini) == pytest.approx((0.5, 0.5))

    def test_dot_two_decoupled(self):
        assert asymptotic_conditional_occupation(0.0, DotAmplitudes(1, 0)) == pytest.approx((1.0, 0.0))

    def test_general_gamma_projection(self):
        p1, p2 = asymptotic_conditional_occupation(2.0, DotAmplitudes(1, 0))
        assert p1 == pytest.approx(1 / 5) and p2 == pytest.approx(4 / 5)

    def test_pure_bright_state_rejected(self):
        with pytest.raises(ParameterError, match="no dark-state component"):
            asymptotic_conditional_occupation(1.0, DotAmplitudes(1, 1))

    @given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
    def test_symmetric_always_half(self, b1, b2):
        if abs(b1 - b2) < 1e-6 or abs(b1) + abs(b2) < 1e-6:
            return
        p = asymptotic_conditional_occupation(1.0, DotAmplitudes(b1, b2))
        assert p == pytest.approx((0.5, 0.5), abs=1e-12)
