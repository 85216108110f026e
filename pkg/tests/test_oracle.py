import math

import numpy as np
import pytest

from zenotransfer import (
    DotAmplitudes,
    FullState,
    MeasurementProtocol,
    ParameterError,
    PhysParams,
    discretize,
    evolve_full,
    mixing_angle,
    project_null_full,
    run_protocol,
    run_protocol_oracle,
    run_unmeasured,
    run_unmeasured_oracle,
)

ALIGNED = PhysParams.aligned(0.0, 1.0, 3.0)


class TestDiscretize:
    def test_sum_rule(self):
        res = discretize(ALIGNED, 2001, 150.0)
        closed_form = 3.0 / math.pi * math.atan(50.0)
        assert closed_form == pytest.approx(1.48090, abs=1e-5)
        np.testing.assert_allclose(res.coupling_sums(), closed_form, rtol=5e-3)
        np.testing.assert_allclose(res.sum_rule_target(), closed_form, rtol=1e-14)
        assert res.sum_rule_deficit() == pytest.approx(1 - 2 / math.pi * math.atan(50), abs=1e-4)

    def test_decoupled_dot(self):
        res = discretize(PhysParams(gamma2=0.0), 101)
        assert np.all(res.couplings[1] == 0)

    def test_spacing(self):
        res = discretize(ALIGNED, 2001, 150.0)
        assert res.spacing == 2 * 150.0 / 2000
        assert res.mode_energies[1000] == 0.0

    def test_default_cutoff(self):
        assert discretize(ALIGNED, 51).e_max == 150.0

    def test_constant_ratio(self):
        res = discretize(PhysParams(0, 0, 4.0, 1.0, 3.0), 101)
        np.testing.assert_allclose(res.couplings[0] / res.couplings[1], 2.0, rtol=1e-14)

    @pytest.mark.parametrize("kw,msg", [({"n_modes": 100}, "odd"),
                                        ({"n_modes": 101, "e_max": 2.0}, "at least the bandwidth")])
    def test_rejections(self, kw, msg):
        with pytest.raises(ParameterError, match=msg):
            discretize(ALIGNED, **kw)


class TestEvolveFull:
    def test_zero_coupling_phases(self):
        p = PhysParams(0.3, -0.4, 0.0, 0.0, 3.0)
        res = discretize(p, 51)
        s = FullState(0.6, 0.8, np.full(51, 0.01 + 0j))
        out = evolve_full(s, res, 1.3)
        assert out.b1 == pytest.approx(0.6 * np.exp(-0.3j * 1.3), abs=1e-13)
        assert out.b2 == pytest.approx(0.8 * np.exp(0.4j * 1.3), abs=1e-13)
        np.testing.assert_allclose(out.reservoir, 0.01 * np.exp(-1j * res.mode_energies * 1.3), atol=1e-13)

    def test_unitarity(self):
        p = PhysParams(0.05, -0.05, 1.0, 0.7, 3.0)
        res = discretize(p, 501)
        s = FullState.from_dots(DotAmplitudes(0.6, 0.8j), 501)
        for _ in range(10):
            s = evolve_full(s, res, 1.0)
        assert s.norm2 == pytest.approx(1.0, abs=1e-10)

    def test_matches_pseudomode(self):
        t = np.linspace(0, 6, 25)
        ini = DotAmplitudes(1, 0)
        o = run_unmeasured_oracle(ALIGNED, t, ini, n_modes=2001)
        e = run_unmeasured(ALIGNED, t, ini)
        assert np.max(np.abs(np.sqrt(o.null_prob * o.p1) - np.sqrt(e.null_prob * e.p1))) < 2e-3
        assert np.max(np.abs(np.sqrt(o.null_prob * o.p2) - np.sqrt(e.null_prob * e.p2))) < 2e-3


class TestProjectFull:
    def test_identity_on_empty_reservoir(self):
        s = FullState.from_dots(DotAmplitudes(0.6, 0.8), 11)
        out = project_null_full(s)
        assert (out.b1, out.b2) == (s.b1, s.b2) and not out.reservoir.any()

    def test_norm_loss(self):
        r = np.linspace(0, 0.1, 11) * 1j
        s = FullState(0.5, 0.5, r)
        assert s.norm2 - project_null_full(s).norm2 == pytest.approx(np.sum(np.abs(r) ** 2), abs=1e-15)


class TestProtocolOracle:
    def test_full_state_path_matches_dot_block(self):
        p = PhysParams(0.05, -0.05, 1.0, 1.0, 3.0)
        pr = MeasurementProtocol.from_x(2.0, 4.0, 3.0)
        ini = DotAmplitudes(1, 0)
        fast = run_protocol_oracle(p, pr, ini, 201, 30.0)
        slow = run_protocol_oracle(p, pr, ini, 201, 30.0, full_state=True)
        np.testing.assert_allclose(fast.p1, slow.p1, atol=1e-12)
        np.testing.assert_allclose(fast.null_prob, slow.null_prob, atol=1e-12)

    def test_decoupled_dot_stays(self):
        p = PhysParams(0.0, 0.0, 1.0, 0.0, 3.0)
        tr = run_protocol_oracle(p, MeasurementProtocol.from_x(2.0, 6.0, 3.0), DotAmplitudes(0, 1), 501)
        np.testing.assert_allclose(tr.p2, 1.0, atol=1e-14)

    def test_deep_zeno(self):
        pr = MeasurementProtocol.from_x(0.02, 6.0, 3.0)
        ini = DotAmplitudes(1, 0)
        o = run_protocol_oracle(ALIGNED, pr, ini, 1001)
        e = run_protocol(ALIGNED, pr, ini)
        assert np.all(np.abs(o.p1 - 1) < 5e-3)
        assert o.max_abs_diff(e) < 5e-3

    def test_metadata(self):
        tr = run_protocol_oracle(ALIGNED, MeasurementProtocol.from_x(2.0, 2.0, 3.0),
                                 DotAmplitudes(1, 0), 501)
        assert tr.method == "oracle"
        assert tr.meta["n_modes"] == 501 and tr.meta["e_max"] == 150.0
        assert 0 < tr.meta["sum_rule_deficit"] < 0.02

    def test_recurrence_horizon(self):
        res = discretize(ALIGNED, 101)
        with pytest.raises(ParameterError, match="recurrence"):
            run_protocol_oracle(ALIGNED, MeasurementProtocol.from_x(2.0, 1.01 * res.recurrence_time, 3.0),
                                DotAmplitudes(1, 0), 101)

    def test_cutoff_convergence_at_fixed_density(self):
        pr = MeasurementProtocol.from_x(0.2, 6.0, 3.0)
        ini = DotAmplitudes(1, 0)
        e = run_protocol(ALIGNED, pr, ini)
        errs = [run_protocol_oracle(ALIGNED, pr, ini, n, em).max_abs_diff(e)
                for n, em in [(251, 37.5), (501, 75.0), (1001, 150.0)]]
        assert errs[0] > errs[1] > errs[2]


class TestInvariants:
    def test_unmeasured_unitarity(self):
        res = discretize(PhysParams(0.05, -0.05, 1.0, 1.0, 3.0), 1001)
        s = FullState.from_dots(DotAmplitudes(1, 0), 1001)
        s = evolve_full(s, res, 10.0)
        assert abs(s.norm2 - 1) < 1e-10

    def test_dark_state_fidelity(self):
        p = PhysParams(0.0, 0.0, 4.0, 1.0, 3.0)
        ang = mixing_angle(p.coupling_ratio)
        ini = DotAmplitudes(ang.cos_beta, -ang.sin_beta)
        tr = run_unmeasured_oracle(p, np.linspace(0, 10, 11), ini, 1001)
        assert 1 - tr.null_prob.min() < 1e-6
