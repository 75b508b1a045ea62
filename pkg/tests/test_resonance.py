import math
from fractions import Fraction

import numpy as np
import pytest

import resonant_waves as rw
from conftest import random_series


def brute_force_pair_scan(eps, omega1, gamma, lmax):
    """Plain double-loop oracle for the case 'b' gap conditions."""
    for l1 in range(-lmax, lmax + 1):
        for l2 in range(-lmax, lmax + 1):
            if l1 == 0 or l2 == 0:
                continue
            bound = gamma / (abs(l1) + abs(l2))
            if abs(omega1 * l1 + eps * l2) <= bound:
                return False
            if abs(omega1 * l1 + (2.0 + eps) * l2) <= bound:
                return False
    return True


class TestEpsSieve:
    def test_exact_resonance_rejected(self):
        res = rw.accepts_eps(0.5, 0.1, 8)
        assert not res.accepted
        assert res.witness == (-1, 2)

    def test_zero_accepted(self):
        assert rw.accepts_eps(0.0, 0.1, 64).accepted

    def test_near_resonance_witness(self):
        res = rw.accepts_eps(0.0501, 0.1, 32)
        assert not res.accepted
        assert res.witness == (-1, 20)

    def test_all_rationals_rejected(self):
        gamma = 1e-3
        for q in range(1, 65):
            for p in range(1, q):
                if math.gcd(p, q) != 1 or p / q >= 0.1:
                    continue
                for sign in (1, -1):
                    eps = sign * p / q
                    assert not rw.accepts_eps(eps, gamma, 64).accepted, (p, q)

    def test_lmax_precondition(self):
        with pytest.raises(ValueError):
            rw.accepts_eps(0.01, 1e-3, 0)


class TestPairSieve:
    def test_rational_omega1_rejected(self):
        res = rw.accepts_pair(1e-3, 1.5, 1e-3, 16)
        assert not res.accepted
        assert res.condition == "omega1 rational"
        assert res.witness == (3, 2)

    def test_golden_accepted(self):
        res = rw.accepts_pair(1e-3, 1.6180339887, 1e-3, 64)
        assert res.accepted
        assert brute_force_pair_scan(1e-3, 1.6180339887, 1e-3, 64)

    def test_constructed_second_condition_failure(self):
        omega1 = 1.6180339887
        eps = 2.0 * omega1 - 2.0  # omega1*2 - (2 + eps) = 0 at (2, -1)
        res = rw.accepts_pair(eps, omega1, 1e-3, 8)
        assert not res.accepted
        assert res.condition == "second gap"

    def test_ratio_rationality_surrogate(self):
        omega1 = 1.6180339887498949
        eps = omega1 / 1.5 - 1.0  # omega1 / (1 + eps) = 3/2
        res = rw.accepts_pair(eps, omega1, 1e-3, 8)
        assert not res.accepted
        assert res.condition == "omega1/omega2 rational"

    def test_matches_brute_force_on_grid(self):
        rng = np.random.default_rng(0)
        omega1 = 1.6180339887
        for _ in range(10):
            eps = float(rng.uniform(-5e-3, 5e-3))
            mine = rw.accepts_pair(eps, omega1, 1e-3, 24).accepted
            assert mine == brute_force_pair_scan(eps, omega1, 1e-3, 24)


def test_rational_convergent():
    assert rw.rational_convergent(1.5, 10) == (3, 2)
    assert rw.rational_convergent(0.25, 10) == (1, 4)
    assert rw.rational_convergent((1 + math.sqrt(5)) / 2, 10 ** 6) is None


class TestSieveInterval:
    def test_excludes_resonance_strip(self):
        pts = rw.sieve_table("a", (0.4, 0.6), 0.1, 8, 40)
        rejected = [p.eps for p in pts if not p.accepted]
        assert any(abs(e - 0.5) < 0.02 for e in rejected)
        accepted = rw.sieve_interval("a", (0.4, 0.6), 0.1, 8, 40)
        assert all(abs(p.eps - 0.5) > 0.005 for p in accepted)

    def test_both_signs_present(self):
        pts = rw.sieve_interval("a", (-1e-3, 1e-3), 1e-4, 64, 50)
        assert any(p.eps > 0 for p in pts)
        assert any(p.eps < 0 for p in pts)

    def test_count_precondition(self):
        with pytest.raises(ValueError):
            rw.sieve_interval("a", (0.0, 0.1), 1e-3, 8, 0)


class TestEigenvalues:
    def test_examples(self):
        s0 = rw.FrequencySetup("a", 0.0, 1e-3)
        assert rw.eigenvalue(rw.wave_operator(s0), (1, 1)) == pytest.approx(3.0)
        s1 = rw.FrequencySetup("a", 0.01, 1e-3)
        assert rw.eigenvalue(rw.wave_operator(s1), (1, 1)) == pytest.approx(3.0401)
        assert rw.eigenvalue(rw.wave_operator(s1), (-2, 1)) == pytest.approx(
            (-2 + 0.01) * 0.01)

    def test_kernel_rule_on_families(self):
        s = rw.FrequencySetup("a", 0.02, 1e-3)
        kop = rw.kernel_operator(s)
        # phi2-only family: -(2+eps) l2^2
        assert kop.rule((0, 3)) == pytest.approx(-(2.02) * 9)
        # counter-propagating family (2k, -k): (2-eps) k^2
        assert kop.rule((2, -1)) == pytest.approx(2.0 - 0.02)

    def test_kernel_vanishing_at_zero_detuning(self):
        s0 = rw.FrequencySetup("a", 0.0, 1e-3)
        dec = rw.Decomposition(s0, 10, 10, 4)
        op = rw.wave_operator(s0)
        kernel = set(dec.kernel_indices())
        for l1 in range(-10, 11):
            for l2 in range(-10, 11):
                vanishes = rw.eigenvalue(op, (l1, l2)) == 0.0
                assert vanishes == ((l1, l2) in kernel)


class TestDecomposition:
    def test_classification_examples(self):
        s = rw.FrequencySetup("a", 1e-4, 1e-3)
        dec = rw.Decomposition(s, 8, 8, 3)
        assert dec.classify((-2, 1)) == "kernel_neg"
        assert dec.classify((1, 1)) == "range"
        assert dec.classify((0, 3)) == "kernel_pos"
        assert dec.classify((0, 0)) == "mean"

    def test_partition(self):
        for case_kwargs in ({"n": 1, "m": 1}, {"n": 3, "m": 2}, {"n": 2, "m": 3}):
            s = rw.FrequencySetup("a", 1e-4, 1e-3, **case_kwargs)
            dec = rw.Decomposition(s, 12, 12, 4)
            for l1 in range(-12, 13):
                for l2 in range(-12, 13):
                    fams = [dec.classify((l1, l2))]
                    assert len(fams) == 1
                    assert fams[0] in ("mean", "kernel_pos", "kernel_neg", "range")
        sb = rw.FrequencySetup("b", 1e-4, 1e-3, omega1_value=1.618)
        decb = rw.Decomposition(sb, 6, 6, 3)
        assert decb.classify((1, 1)) == "range"
        assert decb.classify((0, 2)) == "kernel_pos"

    def test_minus_family_lattice(self):
        s = rw.FrequencySetup("a", 1e-4, 1e-3, n=3, m=2)
        dec = rw.Decomposition(s, 12, 12, 3)
        members = [(l1, l2) for l1 in range(-12, 13) for l2 in range(-12, 13)
                   if dec.classify((l1, l2)) == "kernel_neg"]
        expected = [(4 * k, -3 * k) for k in (-3, -2, -1, 1, 2, 3)]
        assert sorted(members) == sorted(expected)

    def test_project_examples_and_algebra(self, dec_a):
        u = rw.Series2D.cosine((0, 1), 1.0, dec_a.M1, dec_a.M2)
        assert rw.project(dec_a, u, "kernel_pos").coeffs == u.coeffs
        sb = rw.FrequencySetup("b", 1e-4, 1e-3, omega1_value=1.618)
        decb = rw.Decomposition(sb, 4, 4, 2)
        mixed = rw.Series2D.cosine((1, 1), 1.0, 4, 4)
        assert rw.project(decb, mixed, "kernel").is_zero()

        rng = np.random.default_rng(1)
        u = random_series(rng, dec_a.M1, dec_a.M2, nnz=30)
        pk = rw.project(dec_a, u, "kernel")
        pr = rw.project(dec_a, u, "range")
        assert (pk + pr).coeffs == u.coeffs
        assert rw.project(dec_a, pk, "kernel").coeffs == pk.coeffs
        assert rw.project(dec_a, pk, "range").is_zero()
        parts = [rw.project(dec_a, u, t)
                 for t in ("mean", "kernel_pos", "kernel_neg", "range")]
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        assert total.coeffs == u.coeffs
        low = rw.project(dec_a, u, "kernel_low")
        tail = rw.project(dec_a, u, "kernel_tail")
        assert (low + tail).coeffs == pk.coeffs


class TestCertification:
    def test_zero_detuning_pass(self):
        s = rw.FrequencySetup("a", 0.0, 0.1)
        dec = rw.Decomposition(s, 16, 16, 4)
        cert = rw.certify_bounds(dec, rw.wave_operator(s))
        assert cert.passes
        # modes (1, 0) and (1, -1) realize |D_l| = 1 at eps = 0
        assert cert.min_abs_on_range == pytest.approx(1.0)

    def test_unsieved_detuning_fails(self):
        s = rw.FrequencySetup("a", 0.5, 0.1, eps0=1.0)
        dec = rw.Decomposition(s, 8, 8, 3)
        cert = rw.certify_bounds(dec, rw.wave_operator(s))
        assert not cert.passes
        l1, l2 = cert.sieve.witness
        assert l1 + 0.5 * l2 == 0  # on the resonant line through (-1, 2)

    def test_case_b_certified_sample(self, dec_b, cert_b):
        assert cert_b.passes
        assert cert_b.min_abs_on_range > cert_b.threshold == dec_b.setup.gamma

    def test_tail_bound(self, dec_a, cert_a):
        assert cert_a.tail_ok
        assert cert_a.tail_min >= cert_a.tail_threshold


class TestInverses:
    def test_invert_on_range_examples(self, dec_a, cert_a):
        op = rw.wave_operator(dec_a.setup)
        zero = rw.Series2D.zero(dec_a.M1, dec_a.M2)
        assert rw.invert_on_range(dec_a, op, zero, cert_a).is_zero()
        s1 = rw.FrequencySetup("a", 0.01, 1e-3)
        dec1 = rw.Decomposition(s1, 8, 8, 3)
        cert1 = rw.certify_bounds(dec1, rw.wave_operator(s1))
        h = rw.Series2D(8, 8, {(1, 1): 0.5 + 0.25j})
        out = rw.invert_on_range(dec1, rw.wave_operator(s1), h, cert1)
        assert out.get((1, 1)) == pytest.approx((0.5 + 0.25j) / 3.0401)

    def test_round_trip(self, dec_a, cert_a):
        rng = np.random.default_rng(2)
        op = rw.wave_operator(dec_a.setup)
        u = random_series(rng, dec_a.M1, dec_a.M2, nnz=25)
        h = rw.project(dec_a, u, "range")
        fwd = h.map_symbol(op.rule)
        back = rw.invert_on_range(dec_a, op, fwd, cert_a)
        gap = rw.weighted_norm(back - h, rw.SpaceWeights(0.0, 0.0))
        assert gap <= 1e-14 * max(1.0, rw.weighted_norm(h, rw.SpaceWeights(0.0, 0.0)))

    def test_support_and_certificate_errors(self, dec_a, cert_a):
        op = rw.wave_operator(dec_a.setup)
        bad = rw.Series2D.cosine((0, 1), 1.0, dec_a.M1, dec_a.M2)
        with pytest.raises(rw.SupportError):
            rw.invert_on_range(dec_a, op, bad, cert_a)
        h = rw.Series2D(dec_a.M1, dec_a.M2, {(1, 1): 1.0})
        with pytest.raises(rw.UncertifiedError):
            rw.invert_on_range(dec_a, op, h, None)

    def test_certified_bound_never_small_divides(self, dec_a, cert_a):
        # after a passing certificate, every divisor exceeds gamma/m^2
        op = rw.wave_operator(dec_a.setup)
        thresh = dec_a.setup.gamma / dec_a.setup.m ** 2
        for l1 in range(-dec_a.M1, dec_a.M1 + 1):
            for l2 in range(-dec_a.M2, dec_a.M2 + 1):
                if dec_a.classify((l1, l2)) == "range":
                    assert abs(op.rule((l1, l2))) > thresh

    def test_invert_kernel_tail(self, dec_a):
        eps = dec_a.setup.eps
        N = dec_a.N
        h = rw.Series2D(dec_a.M1, dec_a.M2, {(0, N + 1): 1.0 + 0.5j})
        out = rw.invert_kernel_tail(dec_a, h)
        assert out.get((0, N + 1)) == pytest.approx(
            (1.0 + 0.5j) / (-(2.0 + eps) * (N + 1) ** 2))
        with pytest.raises(rw.SupportError):
            rw.invert_kernel_tail(dec_a, rw.Series2D(dec_a.M1, dec_a.M2, {(0, 1): 1.0}))
        assert rw.invert_kernel_tail(dec_a, rw.Series2D.zero()).is_zero()
        rng = np.random.default_rng(3)
        u = random_series(rng, dec_a.M1, dec_a.M2, nnz=30)
        h = rw.project(dec_a, u, "kernel_tail")
        kop = rw.kernel_operator(dec_a.setup)
        back = rw.invert_kernel_tail(dec_a, h.map_symbol(kop.rule))
        gap = rw.weighted_norm(back - h, rw.SpaceWeights(0.0, 0.0))
        assert gap <= 1e-14 * max(1.0, rw.weighted_norm(h, rw.SpaceWeights(0.0, 0.0)))


def test_setup_validation():
    with pytest.raises(ValueError):
        rw.FrequencySetup("a", 1e-4, 0.2)          # gamma outside (0, 1/6)
    with pytest.raises(ValueError):
        rw.FrequencySetup("a", 0.5, 1e-3)          # |eps| >= eps0
    with pytest.raises(ValueError):
        rw.FrequencySetup("a", 1e-4, 1e-3, n=2, m=4)
    with pytest.raises(ValueError):
        rw.FrequencySetup("b", 1e-4, 1e-3, omega1_value=2.5)
    s = rw.FrequencySetup("a", 1e-4, 1e-3, n=3, m=2)
    assert s.omega1 == pytest.approx(1.5)
    assert s.delta(2) == pytest.approx(1e-2)
    assert s.delta(3) == pytest.approx(1e-1)


def test_weight_windows():
    rw.validate_weights_for_case(rw.SpaceWeights(0.1, 0.4), "a")
    with pytest.raises(ValueError):
        rw.validate_weights_for_case(rw.SpaceWeights(0.1, 0.6), "a")
    with pytest.raises(ValueError):
        rw.validate_weights_for_case(rw.SpaceWeights(0.1, 0.6), "b", s_coeff=1.0)
    rw.validate_weights_for_case(rw.SpaceWeights(0.1, 1.2), "b", s_coeff=2.0)
    s = rw.FrequencySetup("a", 1e-4, 1e-3)
    dec = rw.Decomposition(s, 8, 8, 8)
    with pytest.raises(ValueError):
        rw.validate_pairing(dec, rw.SpaceWeights(0.2, 0.4))
    rw.validate_pairing(dec, rw.SpaceWeights(1.0 / 8, 0.4))
