import math

import numpy as np
import pytest

import chiralqed as cq
from chiralqed import ConfigError, ParameterError
from conftest import CESIUM_RATIO, draw_couplings


class TestSystemParams:
    def test_defaults_and_coercion(self):
        p = cq.SystemParams(g_q=0.01, g_a=0.05, g_b=0.02)
        assert p.kappa == 1.0
        assert p.gamma_q == p.delta_b == 0.0
        assert isinstance(p.g_q, float)
        assert p.is_lossless_resonant

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"g_q": -0.1, "g_a": 0.1, "g_b": 0.1},
            {"g_q": 0.1, "g_a": 0.1, "g_b": 0.1, "kappa": 0.0},
            {"g_q": 0.1, "g_a": 0.1, "g_b": 0.1, "kappa": -1.0},
            {"g_q": 0.1, "g_a": 0.1, "g_b": 0.1, "gamma_a": -1e-3},
            {"g_q": float("nan"), "g_a": 0.1, "g_b": 0.1},
            {"g_q": 0.1, "g_a": float("inf"), "g_b": 0.1},
            {"g_q": 0.1, "g_a": 0.1, "g_b": 0.1, "delta_q": float("nan")},
            {"g_q": "0.1", "g_a": 0.1, "g_b": 0.1},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            cq.SystemParams(**kwargs)

    def test_negative_detuning_allowed(self):
        cq.SystemParams(g_q=0.1, g_a=0.1, g_b=0.1, delta_q=-0.5)

    def test_normalized(self):
        p = cq.SystemParams(g_q=2.0, g_a=10.0, g_b=4.0, kappa=200.0, gamma_q=0.2, delta_a=-3.0)
        n = p.normalized()
        assert n.kappa == 1.0
        assert n.g_q == 0.01 and n.g_a == 0.05
        assert n.gamma_q == 0.001 and n.delta_a == -0.015
        assert p.normalized() is not n or True  # value semantics only
        assert cq.SystemParams(g_q=0.01, g_a=0.05, g_b=0.02).normalized() is not None


class TestEffectiveRates:
    def test_equal_couplings_example(self):
        rates = cq.derive_effective_rates(cq.SystemParams(g_q=0.1, g_a=0.1, g_b=0.1))
        assert rates.Gamma_q == pytest.approx(0.02, rel=1e-15)
        assert rates.Gamma_a == pytest.approx(0.01, rel=1e-15)
        assert rates.Gamma_b == pytest.approx(0.01, rel=1e-15)
        assert rates.R == pytest.approx(0.02, rel=1e-15)
        assert rates.lambda_plus == pytest.approx(-0.01, rel=1e-15)
        assert rates.lambda_minus == pytest.approx(-0.03, rel=1e-15)

    def test_degenerate_limit_example(self):
        rates = cq.derive_effective_rates(cq.SystemParams(g_q=0.0, g_a=0.1, g_b=0.0))
        assert rates.Gamma_q == 0.0
        assert rates.R == rates.Gamma_a == pytest.approx(0.01, rel=1e-15)
        assert rates.lambda_plus == 0.0
        assert rates.lambda_minus == pytest.approx(-0.01, rel=1e-15)

    def test_cesium_ratio_of_rates(self):
        # g_b = g_a / sqrt(45) puts the two atomic rates in a 45:1 ratio
        p = cq.SystemParams(g_q=0.01, g_a=0.05, g_b=0.05 * CESIUM_RATIO)
        rates = cq.derive_effective_rates(p)
        assert rates.Gamma_b == pytest.approx(rates.Gamma_a / 45.0, rel=1e-14)

    def test_eigenvalue_identities(self):
        rng = np.random.default_rng(101)
        for _ in range(500):
            p = draw_couplings(rng)
            rates = cq.derive_effective_rates(p)
            assert rates.lambda_minus <= rates.lambda_plus <= 0.0
            total = rates.Gamma_a + rates.Gamma_b + rates.Gamma_q
            assert rates.lambda_plus + rates.lambda_minus == pytest.approx(-total, rel=1e-14)
            product = rates.Gamma_a * rates.Gamma_b + 0.5 * rates.Gamma_q * (
                rates.Gamma_a + rates.Gamma_b
            )
            assert rates.lambda_plus * rates.lambda_minus == pytest.approx(product, rel=1e-14)

    def test_matches_reduced_generator_spectrum(self):
        rng = np.random.default_rng(102)
        for _ in range(200):
            p = draw_couplings(rng)
            rates = cq.derive_effective_rates(p)
            w = np.sort(cq.ReducedGenerator.from_params(p).eigenvalues)
            assert w[0] == pytest.approx(rates.lambda_minus, rel=1e-12)
            assert w[1] == pytest.approx(rates.lambda_plus, rel=1e-12, abs=1e-15)
            assert abs(w[2]) < 1e-15

    def test_scale_covariance(self):
        rng = np.random.default_rng(103)
        for _ in range(100):
            p = draw_couplings(rng)
            base = cq.derive_effective_rates(p)
            s = float(10.0 ** rng.uniform(-1, 2))
            scaled = cq.derive_effective_rates(
                cq.SystemParams(g_q=p.g_q * s, g_a=p.g_a * s, g_b=p.g_b * s, kappa=s * s)
            )
            assert scaled.Gamma_q == pytest.approx(base.Gamma_q, rel=1e-12)
            assert scaled.Gamma_a == pytest.approx(base.Gamma_a, rel=1e-12)
            assert scaled.Gamma_b == pytest.approx(base.Gamma_b, rel=1e-12)
            assert scaled.lambda_minus == pytest.approx(base.lambda_minus, rel=1e-12)


class TestRatios:
    def test_cesium_example(self):
        r = cq.ratios_of(cq.SystemParams(g_q=0.01, g_a=0.05, g_b=0.05 / math.sqrt(45)))
        assert r.r == pytest.approx(0.2, rel=1e-15)
        assert r.r_a == pytest.approx(1.0 / math.sqrt(45), rel=1e-15)

    def test_identity(self):
        r = cq.ratios_of(cq.SystemParams(g_q=0.03, g_a=0.03, g_b=0.03))
        assert r.r == 1.0 and r.r_a == 1.0

    def test_division_by_zero_guard(self):
        with pytest.raises(ParameterError):
            cq.ratios_of(cq.SystemParams(g_q=0.01, g_a=0.0, g_b=0.0))

    def test_ratio_invariants(self):
        with pytest.raises(ParameterError):
            cq.CouplingRatios(r=0.0, r_a=0.5)
        with pytest.raises(ParameterError):
            cq.CouplingRatios(r=0.5, r_a=-0.1)
        assert cq.CouplingRatios(r=0.5, r_a=0.0).r_a == 0.0  # no-dark-state flag value


class TestRegime:
    def test_good_regime(self):
        rep = cq.check_regime(cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05))
        assert rep.bad_cavity_ok and rep.purcell_ok and rep.ok
        assert rep.worst_ratio == pytest.approx(0.5)
        assert rep.messages == ()

    def test_bad_cavity_violation(self):
        rep = cq.check_regime(cq.SystemParams(g_q=0.2, g_a=0.05, g_b=0.05))
        assert not rep.bad_cavity_ok
        assert rep.worst_ratio == pytest.approx(2.0)
        assert any("bad-cavity" in m for m in rep.messages)

    def test_purcell_violation(self):
        p = cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05, gamma_q=0.05)
        rep = cq.check_regime(p)
        assert rep.bad_cavity_ok and not rep.purcell_ok

    def test_margin_validation(self):
        with pytest.raises(ParameterError):
            cq.check_regime(cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05), margin=1.0)

    def test_zero_coupling_with_decay(self):
        rep = cq.check_regime(cq.SystemParams(g_q=0.0, g_a=0.0, g_b=0.0, gamma_q=0.01))
        assert not rep.purcell_ok


class TestParamsFile:
    def test_load_and_defaults(self, tmp_path):
        cfg = tmp_path / "params.cfg"
        cfg.write_text(
            "# cesium-like setup\n"
            "g_q = 0.01\n"
            "g_a=0.05\n"
            "g_b = 0.00745355992\n"
            "delta_q = -0.002  # trailing comment\n"
        )
        values = cq.load_params_file(cfg)
        params = cq.params_from_mapping(values)
        assert params.g_a == 0.05
        assert params.delta_q == -0.002
        assert params.gamma_q == 0.0 and params.kappa == 1.0

    def test_unknown_key_is_error(self, tmp_path):
        cfg = tmp_path / "params.cfg"
        cfg.write_text("g_c = 0.01\n")
        with pytest.raises(ConfigError, match="g_c"):
            cq.load_params_file(cfg)

    def test_malformed_line_reports_line_number(self, tmp_path):
        cfg = tmp_path / "params.cfg"
        cfg.write_text("g_q = 0.01\nthis is not a setting\n")
        with pytest.raises(ConfigError, match=":2:"):
            cq.load_params_file(cfg)

    def test_non_numeric_value(self, tmp_path):
        cfg = tmp_path / "params.cfg"
        cfg.write_text("g_q = fast\n")
        with pytest.raises(ConfigError, match="not a number"):
            cq.load_params_file(cfg)

    def test_duplicate_key(self, tmp_path):
        cfg = tmp_path / "params.cfg"
        cfg.write_text("g_q = 0.01\ng_q = 0.02\n")
        with pytest.raises(ConfigError, match="duplicate"):
            cq.load_params_file(cfg)

    def test_missing_couplings(self):
        with pytest.raises(ConfigError, match="g_b"):
            cq.params_from_mapping({"g_q": 0.01, "g_a": 0.05})

    def test_mapping_unknown_key(self):
        with pytest.raises(ConfigError, match="g_z"):
            cq.params_from_mapping({"g_q": 0.01, "g_a": 0.05, "g_b": 0.01, "g_z": 1.0})
