import math

import numpy as np
import pytest
from scipy import integrate

import resonant_waves as rw


class TestPeriodMap:
    def test_d1_sanity(self):
        for E in (0.3, 1.0, 4.7):
            assert rw.period(E, 1) == pytest.approx(math.pi * math.sqrt(2.0),
                                                    abs=1e-12)

    def test_quadrature_against_adaptive_and_beta(self):
        for d in (2, 3, 4):
            val, err = integrate.quad(
                lambda x, d=d: 1.0 / math.sqrt(2.0 * (1.0 - x ** (2 * d))),
                0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
            assert rw.orbit_integral(d) == pytest.approx(val, abs=1e-11)
            assert rw.orbit_integral(d) == pytest.approx(
                rw.orbit_integral_closed_form(d), abs=1e-12)
        assert rw.orbit_integral(2) == pytest.approx(0.9270373, abs=1e-7)

    def test_scaling_homogeneity(self):
        assert rw.period(16.0 * 1.7, 2) / rw.period(1.7, 2) == pytest.approx(0.5)

    def test_monotone_decreasing(self):
        for d in (2, 3):
            Es = np.geomspace(1e-3, 1e3, 20)
            Ts = [rw.period(E, d) for E in Es]
            assert all(a > b for a, b in zip(Ts, Ts[1:]))

    def test_derivative(self):
        assert rw.period_derivative(0.7, 1) == 0.0
        for d in (2, 3):
            for E in np.geomspace(0.05, 20.0, 20):
                dT = rw.period_derivative(E, d)
                assert dT < 0.0
            h = 1e-5 * E
            fd = (rw.period(E + h, d) - rw.period(E - h, d)) / (2 * h)
            assert rw.period_derivative(E, d) == pytest.approx(fd, rel=1e-8)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            rw.period(0.0, 2)
        with pytest.raises(ValueError):
            rw.period_derivative(-1.0, 2)


class TestPeriodEquation:
    def test_d2_root(self):
        E = rw.energy_for_period(2)
        closed = (2.0 * rw.orbit_integral_closed_form(2) / math.pi) ** 4
        assert abs(rw.period(E, 2) - 2.0 * math.pi) < 1e-12
        assert E == pytest.approx(closed, abs=1e-10)

    def test_uniqueness_bracket(self):
        E = rw.energy_for_period(2)
        assert rw.period(E / 2.0, 2) > 2.0 * math.pi > rw.period(2.0 * E, 2)

    def test_rejects_isochronous(self):
        with pytest.raises(ValueError):
            rw.energy_for_period(1)


class TestLimitOrbit:
    def test_scale_and_amplitude(self):
        orb = rw.limit_orbit(2, 2.0, 0.0)
        assert orb.scale == pytest.approx(1.0)
        E = rw.energy_for_period(2)
        amp = (2 * 2) ** 0.5 * E ** 0.25
        assert rw.evaluate(orb.qbar, 0.0, 0.0) == pytest.approx(amp, abs=1e-9)
        assert orb.energy == pytest.approx(E)
        assert orb.energy_drift < 1e-10

    def test_collocation_residual(self):
        for d, mean_a, eps in [(2, 2.0, 0.0), (2, 1.0, 1e-4), (3, 0.7, 1e-3)]:
            orb = rw.limit_orbit(d, mean_a, eps)
            lap = orb.qbar.map_symbol(lambda l: -float(l[1] ** 2)).scale(2.0 + eps)
            res = lap + rw.power(orb.qbar, 2 * d - 1).scale(mean_a)
            grid = rw.evaluate_grid(res, 1, 256)
            assert np.abs(grid).max() < 1e-9

    def test_only_odd_harmonics(self):
        orb = rw.limit_orbit(2, 2.0, 0.0)
        assert orb.qbar.coeffs
        for (l1, l2) in orb.qbar.coeffs:
            assert l1 == 0 and l2 % 2 == 1
        assert orb.spectral_decay_rate > 0.5

    def test_translation_family(self):
        orb = rw.limit_orbit(2, 2.0, 1e-4)
        eps = orb.eps
        for theta in (0.4, 1.0, 2.2, math.pi):
            qt = orb.qbar.translate_phi2(theta)
            lap = qt.map_symbol(lambda l: -float(l[1] ** 2)).scale(2.0 + eps)
            res = lap + rw.power(qt, 3).scale(2.0)
            grid = rw.evaluate_grid(res, 1, 256)
            assert np.abs(grid).max() < 1e-9

    def test_phase_convention(self):
        orb = rw.limit_orbit(2, 2.0, 0.0)
        qp, _ = orb.qbar_derivative_initial()
        assert abs(qp) < 1e-12
        grid = rw.evaluate_grid(orb.qbar, 1, 512)[0]
        assert np.argmax(grid) == 0

    def test_sign_condition(self):
        with pytest.raises(ValueError):
            rw.limit_orbit(2, -1.0, 1e-4)
        with pytest.raises(ValueError):
            rw.limit_orbit(2, 1.0, 0.0, _allow_isochronous=False) \
                if False else rw.limit_orbit(1, 1.0, 0.0)
        rw.limit_orbit(2, -1.0, -1e-4)  # consistent signs are fine


class TestMonodromy:
    def test_isochronous_control_rejected(self):
        orb = rw.limit_orbit(1, 1.0, 0.0, _allow_isochronous=True)
        rep = rw.monodromy(orb)
        assert rep["verdict"] == "degenerate"
        assert rep["distance_from_identity"] < 1e-6

    def test_d2_parabolic(self):
        orb = rw.limit_orbit(2, 2.0, 1e-4)
        rep = rw.monodromy(orb)
        assert rep["trace_gap"] < 1e-6
        assert rep["distance_from_identity"] > 1e-3
        assert rep["verdict"] == "non-degenerate"

    def test_floquet_fixed_vector(self):
        orb = rw.limit_orbit(2, 2.0, 1e-4)
        qp, qpp = orb.qbar_derivative_initial()
        vec = np.array([qp, qpp])
        gap = np.linalg.norm(orb.monodromy @ vec - vec)
        assert gap < 1e-8 * max(1.0, np.linalg.norm(vec))


class TestContinuation:
    def test_eta_zero_exact(self, dec_b, cert_b, forced_cubic):
        orbit = rw.limit_orbit(2, 1.0, dec_b.setup.eps)
        out = rw.continue_orbit(dec_b, forced_cubic, orbit, [0.0], cert_b)
        assert out["orbits"][0.0].coeffs == orbit.qbar.coeffs

    def test_constant_coefficient_identity(self, dec_b, cert_b):
        nl = rw.Nonlinearity(2, {3: rw.Series2D.constant(1.0)}, 10.0)
        orbit = rw.limit_orbit(2, 1.0, dec_b.setup.eps)
        out = rw.continue_orbit(dec_b, nl, orbit, [5e-3], cert_b)
        dev = out["diagnostics"][5e-3]["deviation"]
        assert dev < 1e-9

    def test_pure_cubic_bound_shape(self, dec_b, cert_b, forced_cubic):
        # with only a3 present the deviation is O(eta^2/gamma): the C|eta|
        # bound holds with a decaying ratio
        orbit = rw.limit_orbit(2, 1.0, dec_b.setup.eps)
        etas = [1e-2, 5e-3, 2.5e-3]
        out = rw.continue_orbit(dec_b, forced_cubic, orbit, etas, cert_b)
        ratios = [out["diagnostics"][eta]["ratio"] for eta in etas]
        assert all(r < 1.0 for r in ratios)
        assert ratios[0] > ratios[1] > ratios[2]

    def test_quartic_term_linear_ratio_stability(self, dec_b, cert_b):
        # an a4 term makes the O(eta) bound sharp: ratio stable within 2x
        a3 = rw.cosine_table_series([(0, 1.0, 0.0), (1, 1.0, 0.0)], dec_b.M1)
        a4 = rw.cosine_table_series([(0, 0.5, 0.0)], dec_b.M1)
        nl = rw.Nonlinearity(2, {3: a3, 4: a4}, 10.0)
        orbit = rw.limit_orbit(2, 1.0, dec_b.setup.eps)
        etas = [1e-2, 5e-3, 2.5e-3]
        out = rw.continue_orbit(dec_b, nl, orbit, etas, cert_b)
        ratios = [out["diagnostics"][eta]["ratio"] for eta in etas]
        assert max(ratios) / min(ratios) < 2.0

    def test_degenerate_orbit_refused(self, dec_b, cert_b, forced_cubic):
        orb = rw.limit_orbit(1, 1.0, 0.0, _allow_isochronous=True)
        with pytest.raises(rw.DivergenceError):
            rw.continue_orbit(dec_b, forced_cubic, orb, [1e-3], cert_b)


class TestObstruction:
    def test_constant_coefficient_exact(self, dec_b):
        a = rw.Series2D.constant(1.0)
        rep = rw.even_power_obstruction(a, 2, dec_b, [1e-3, 1e-2, 1e-1], [1e-4])
        assert rep.root_free
        for _, rho, h in rep.rows:
            assert h == pytest.approx(rho ** 2, rel=1e-4)

    def test_forced_coefficient_window(self, dec_b):
        a = rw.cosine_table_series([(0, 1.0, 0.0), (1, 1.0, 0.0)], dec_b.M1)
        rep = rw.even_power_obstruction(a, 2, dec_b, [1e-3, 1e-2, 5e-2, 1e-1],
                                        [1e-4])
        assert rep.root_free
        for _, rho, h in rep.rows:
            assert 0.5 <= h / rho ** 2 <= 1.5

    def test_odd_power_rejected(self, dec_b):
        with pytest.raises(ValueError):
            rw.even_power_obstruction(rw.Series2D.constant(1.0), 3, dec_b,
                                      [1e-2], [1e-4])
        with pytest.raises(ValueError):
            rw.even_power_obstruction(
                rw.cosine_table_series([(1, 1.0, 0.0)], 2), 2, dec_b,
                [1e-2], [1e-4])
