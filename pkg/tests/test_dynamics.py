import math

import numpy as np
import pytest
from scipy.integrate import quad

import chiralqed as cq
from chiralqed import IntegrationError, ParameterError, UnsupportedRegimeError
from conftest import CESIUM_RATIO, draw_couplings


def dark_embedded(params):
    ds = cq.dark_state(params)
    return cq.AmplitudeState.from_qab(ds.q, ds.a, ds.b)


class TestAmplitudeState:
    def test_initial_condition(self):
        st = cq.AmplitudeState.qd_excited()
        assert st.norm2 == 1.0 and st.t == 0.0

    def test_norm_leak_rejected(self):
        with pytest.raises(ParameterError):
            cq.AmplitudeState(t=0.0, q=1.0, a=0.1, b=0.0, alpha=0.0, beta=0.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            cq.AmplitudeState(t=0.0, q=float("nan"), a=0.0, b=0.0, alpha=0.0, beta=0.0)


class TestFullRhs:
    def test_dark_state_stationary_exact_equal_couplings(self, equal_params):
        rhs = cq.full_rhs(dark_embedded(equal_params), equal_params)
        assert all(v == 0.0 for v in rhs)

    def test_dark_state_stationary_ulp_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            p = draw_couplings(rng)
            ds = cq.dark_state(p)
            rhs = cq.full_rhs(cq.AmplitudeState.from_qab(ds.q, ds.a, ds.b), p)
            scale = p.g_q * abs(ds.q)
            assert max(abs(v) for v in rhs) <= 4e-16 * scale

    def test_excited_dot_drives_cavity(self):
        p = cq.SystemParams(g_q=0.04, g_a=0.07, g_b=0.02)
        dq, da, db, dalpha, dbeta = cq.full_rhs(cq.AmplitudeState.qd_excited(), p)
        assert dq == 0.0 and da == 0.0 and db == 0.0
        assert dalpha == -1j * p.g_q and dbeta == -1j * p.g_q

    def test_decay_and_detuning_terms(self):
        p = cq.SystemParams(g_q=0.04, g_a=0.07, g_b=0.02, gamma_q=0.003, delta_q=0.01)
        dq, *_ = cq.full_rhs(cq.AmplitudeState.qd_excited(), p)
        assert dq == -(0.5 * 0.003 + 1j * 0.01)


class TestIntegrateFull:
    def test_norm_non_increasing(self, equal_params):
        traj = cq.integrate_full(equal_params, horizon=2000.0)
        diffs = np.diff(traj.norm2)
        assert np.all(diffs <= 1e-12)  # slack for roundoff on the plateau
        assert traj.final.t >= 2000.0
        assert traj.initial.norm2 == 1.0

    def test_norm_decays_with_spontaneous_emission(self, equal_params):
        p = cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05, gamma_q=0.01)
        traj = cq.integrate_full(p, horizon=3000.0)
        assert np.all(np.diff(traj.norm2) <= 1e-12)
        # the dark component itself decays once gamma_q > 0
        assert traj.final.norm2 < 1.0 / 3.0 - 0.05

    def test_dark_state_is_stationary(self, equal_params):
        traj = cq.integrate_full(equal_params, initial=dark_embedded(equal_params), horizon=500.0)
        drift = np.max(np.abs(traj.ys - traj.ys[0]))
        assert drift < traj.step_control.tolerance
        assert np.max(np.abs(traj.ys[:, 3:])) == 0.0  # cavity never populated

    def test_times_strictly_increasing_and_first_is_initial(self, cesium_params):
        traj = cq.integrate_full(cesium_params, horizon=50.0)
        assert np.all(np.diff(traj.ts) > 0)
        assert traj.ts[0] == 0.0 and traj.ys[0, 0] == 1.0 + 0.0j

    def test_adaptive_matches_fixed(self):
        p = cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05, gamma_q=0.001, delta_a=0.002)
        fixed = cq.integrate_full(p, horizon=1500.0)
        adaptive = cq.integrate_full(
            p,
            horizon=1500.0,
            control=cq.StepControl(mode="adaptive", tolerance=1e-11, max_samples=301),
        )
        assert abs(fixed.final.q - adaptive.final.q) < 1e-10
        assert abs(fixed.p_a_quadrature - adaptive.p_a_quadrature) < 1e-9

    def test_quadratures_match_analytic_equal_couplings(self, equal_params):
        # P_a is exactly 1/3 here (symmetry + exact trapping probability)
        rates = cq.derive_effective_rates(equal_params)
        traj = cq.integrate_full(equal_params, horizon=15.0 / abs(rates.lambda_plus))
        assert traj.p_a_quadrature == pytest.approx(1.0 / 3.0, rel=1e-9)
        assert traj.p_b_quadrature == pytest.approx(1.0 / 3.0, rel=1e-9)

    def test_default_horizon(self, cesium_params):
        rates = cq.derive_effective_rates(cesium_params)
        assert cq.default_horizon(cesium_params) == pytest.approx(
            40.0 / abs(rates.lambda_plus)
        )
        with pytest.raises(ParameterError):
            cq.default_horizon(cq.SystemParams(g_q=0.05, g_a=0.0, g_b=0.0))

    def test_initial_time_must_be_zero(self, equal_params):
        shifted = cq.AmplitudeState(t=1.0, q=1.0, a=0.0, b=0.0, alpha=0.0, beta=0.0)
        with pytest.raises(ParameterError):
            cq.integrate_full(equal_params, initial=shifted, horizon=10.0)

    def test_adaptive_failure_carries_last_state(self, equal_params, monkeypatch):
        import scipy.integrate as si

        class FakeSolution:
            success = False
            message = "step size underflow"
            t = np.array([0.0, 0.5])
            y = np.zeros((12, 2))
            y[0, :] = [1.0, 0.9]

        monkeypatch.setattr(si, "solve_ivp", lambda *a, **k: FakeSolution())
        with pytest.raises(IntegrationError) as info:
            cq.integrate_full(
                equal_params, horizon=10.0, control=cq.StepControl(mode="adaptive")
            )
        assert info.value.last_state is not None
        assert info.value.last_state.t == 0.5
        assert info.value.last_state.q == 0.9 + 0.0j

    def test_step_control_validation(self):
        with pytest.raises(ParameterError):
            cq.StepControl(dt=0.0)
        with pytest.raises(ParameterError):
            cq.StepControl(mode="leapfrog")
        with pytest.raises(ParameterError):
            cq.StepControl(max_samples=1)


class TestReducedPropagate:
    def test_initial_condition(self, cesium_params):
        assert np.allclose(cq.reduced_propagate(cesium_params, 0.0), [1.0, 0.0, 0.0], atol=1e-14)

    def test_equal_couplings_closed_form(self, equal_params):
        gamma = equal_params.g_a**2
        for t in (0.0, 3.0, 40.0, 700.0):
            q, a, b = cq.reduced_propagate(equal_params, t)
            decay = math.exp(-3.0 * gamma * t)
            assert q == pytest.approx(1.0 / 3.0 + 2.0 / 3.0 * decay, abs=1e-13)
            assert a == pytest.approx(-1.0 / 3.0 + 1.0 / 3.0 * decay, abs=1e-13)
            assert b == pytest.approx(a, abs=1e-14)

    def test_long_time_limit_is_dark_projection(self, equal_params):
        qab = cq.reduced_propagate(equal_params, 1e7)
        assert np.allclose(qab, [1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0], atol=1e-12)
        assert np.dot(qab, qab) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_vectorized_times(self, cesium_params):
        ts = np.array([0.0, 1.0, 10.0])
        out = cq.reduced_propagate(cesium_params, ts)
        assert out.shape == (3, 3)
        assert np.allclose(out[1], cq.reduced_propagate(cesium_params, 1.0))

    def test_requires_lossless_resonant(self):
        p = cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05, gamma_q=0.01)
        with pytest.raises(UnsupportedRegimeError):
            cq.reduced_propagate(p, 1.0)
        p = cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05, delta_a=0.01)
        with pytest.raises(UnsupportedRegimeError):
            cq.reduced_propagate(p, 1.0)

    def test_null_eigenvector_is_dark_state(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            p = draw_couplings(rng)
            gen = cq.ReducedGenerator.from_params(p)
            dark = cq.dark_state(p).as_vector()
            overlap = abs(np.dot(gen.null_eigenvector, dark))
            assert overlap == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(gen.matrix, gen.matrix.T)


class TestClosedFormAudit:
    def test_starts_at_initial_condition(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            p = draw_couplings(rng)
            qab = cq.closed_form_qab_audit(p, 0.0)
            assert qab[0] == pytest.approx(1.0, abs=1e-14)
            assert qab[1] == 0.0 and qab[2] == 0.0

    def test_decays_to_zero(self, equal_params):
        rates = cq.derive_effective_rates(equal_params)
        qab = cq.closed_form_qab_audit(equal_params, 40.0 / abs(rates.lambda_plus))
        assert np.max(np.abs(qab)) < 1e-12

    def test_equal_couplings_form(self, equal_params):
        gamma = equal_params.g_a**2
        for t in (0.5, 10.0, 150.0):
            q, a, b = cq.closed_form_qab_audit(equal_params, t)
            assert q == pytest.approx(
                0.5 * math.exp(-gamma * t) + 0.5 * math.exp(-3.0 * gamma * t), abs=1e-14
            )

    def test_disagrees_with_reduced_propagator_at_long_times(self, equal_params):
        # regression guard: whenever the dark component is populated the
        # two routes must differ at long times (audit decays, reduced does not)
        rates = cq.derive_effective_rates(equal_params)
        t_inf = 40.0 / abs(rates.lambda_plus)
        audit_q = cq.closed_form_qab_audit(equal_params, t_inf)[0]
        reduced_q = cq.reduced_propagate(equal_params, t_inf)[0]
        assert audit_q == pytest.approx(0.0, abs=1e-12)
        assert reduced_q == pytest.approx(1.0 / 3.0, abs=1e-10)
        assert abs(audit_q - reduced_q) > 0.3

    def test_agreement_at_t0_disagreement_later_random(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            p = draw_couplings(rng)
            p_cd = cq.dark_state_probability(p)
            assert cq.closed_form_qab_audit(p, 0.0)[0] == pytest.approx(
                cq.reduced_propagate(p, 0.0)[0], abs=1e-13
            )
            if p_cd > 1e-4:
                rates = cq.derive_effective_rates(p)
                t_inf = 40.0 / abs(rates.lambda_plus)
                gap = abs(
                    cq.closed_form_qab_audit(p, t_inf)[0]
                    - cq.reduced_propagate(p, t_inf)[0]
                )
                assert gap > 0.5 * p_cd

    def test_singular_case_raises(self):
        with pytest.raises(ParameterError):
            cq.closed_form_qab_audit(cq.SystemParams(g_q=0.0, g_a=0.05, g_b=0.05), 1.0)


class TestClosedFormCavity:
    def test_slaved_initial_value_equal_couplings(self, equal_params):
        alpha, beta = cq.closed_form_cavity(equal_params, 0.0)
        # the slaved value -i g_q / kappa, NOT the true initial value 0
        assert alpha == -0.05j and beta == -0.05j

    def test_equal_couplings_decay(self, equal_params):
        gamma = equal_params.g_a**2
        for t in (0.7, 12.0):
            alpha, beta = cq.closed_form_cavity(equal_params, t)
            expected = -1j * 0.05 * math.exp(-3.0 * gamma * t)
            assert alpha == pytest.approx(expected, abs=1e-16)
            assert beta == pytest.approx(expected, abs=1e-16)

    def test_slaving_relation(self):
        rng = np.random.default_rng(41)
        for _ in range(300):
            p = draw_couplings(rng)
            for t in (0.0, 1.0, 30.0):
                alpha, beta = cq.closed_form_cavity(p, t)
                q, a, b = cq.reduced_propagate(p, t)
                assert alpha == pytest.approx(-1j * (p.g_q * q + p.g_a * a), abs=1e-10)
                assert beta == pytest.approx(-1j * (p.g_q * q + p.g_b * b), abs=1e-10)

    def test_no_dot_coupling_gives_empty_cavity(self):
        alpha, beta = cq.closed_form_cavity(cq.SystemParams(g_q=0.0, g_a=0.05, g_b=0.01), 2.0)
        assert alpha == 0.0 and beta == 0.0

    def test_time_integral_matches_sum_rule(self):
        # independent quadrature of the closed-form amplitudes against the
        # trapping probability; substitution u = |lambda_+| t tames the
        # slowly decaying tail
        rng = np.random.default_rng(43)
        for _ in range(15):
            p = draw_couplings(rng, low=-2.5, high=-0.8)
            lam = abs(cq.derive_effective_rates(p).lambda_plus)

            def integrand(u):
                alpha, beta = cq.closed_form_cavity(p, u / lam)
                return 2.0 * (abs(alpha) ** 2 + abs(beta) ** 2) / lam

            value, _err = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=400)
            assert value == pytest.approx(1.0 - cq.dark_state_probability(p), abs=1e-10)


class TestReducedVsFull:
    def test_dark_overlap_conserved_along_trajectory(self, cesium_params):
        ds = cq.dark_state(cesium_params)
        traj = cq.integrate_full(cesium_params, horizon=2000.0)
        overlap = traj.ys[:, 0] * ds.q + traj.ys[:, 1] * ds.a + traj.ys[:, 2] * ds.b
        drift = np.max(np.abs(overlap - overlap[0]))
        assert drift < 10.0 * traj.step_control.tolerance

    def test_halving_couplings_improves_reduced_model(self):
        def deviation(scale):
            p = cq.SystemParams(
                g_q=0.01 * scale, g_a=0.05 * scale, g_b=0.05 * CESIUM_RATIO * scale
            )
            traj = cq.integrate_full(p, horizon=2000.0)
            reduced = cq.reduced_propagate(p, traj.ts)
            return float(np.max(np.abs(reduced - traj.ys[:, :3].real)))

        dev_full = deviation(1.0)
        dev_half = deviation(0.5)
        assert dev_half < dev_full
