import math

import numpy as np
import pytest

import resonant_waves as rw


def grid_product_coefficients(u, v, G1, G2):
    """Independent multiplication oracle: sample both series pointwise by
    direct exponential sums, multiply on the grid, transform back."""
    p1 = 2.0 * np.pi * np.arange(G1) / G1
    p2 = 2.0 * np.pi * np.arange(G2) / G2
    P1, P2 = np.meshgrid(p1, p2, indexing="ij")

    def sample(series):
        vals = np.zeros((G1, G2), dtype=complex)
        for l, c in series.items_full():
            vals += c * np.exp(1j * (l[0] * P1 + l[1] * P2))
        return vals.real

    prod = sample(u) * sample(v)
    spectrum = np.fft.fft2(prod) / (G1 * G2)
    out = {}
    for i1 in range(G1):
        for i2 in range(G2):
            l1 = i1 if i1 <= G1 // 2 else i1 - G1
            l2 = i2 if i2 <= G2 // 2 else i2 - G2
            if abs(spectrum[i1, i2]) > 1e-12:
                out[(l1, l2)] = spectrum[i1, i2]
    return out


def random_series(rng, M1, M2, nnz=8, scale=1.0):
    coeffs = {}
    for _ in range(nnz):
        l1 = int(rng.integers(-M1, M1 + 1))
        l2 = int(rng.integers(-M2, M2 + 1))
        coeffs[(l1, l2)] = complex(rng.normal(0, scale), rng.normal(0, scale))
    return rw.Series2D(M1, M2, coeffs)


@pytest.fixture(scope="session")
def setup_a():
    return rw.FrequencySetup("a", 1e-4, 1e-3)


@pytest.fixture(scope="session")
def dec_a(setup_a):
    return rw.Decomposition(setup_a, 18, 24, 8)


@pytest.fixture(scope="session")
def cert_a(dec_a):
    cert = rw.certify_bounds(dec_a, rw.wave_operator(dec_a.setup))
    assert cert.passes
    return cert


@pytest.fixture(scope="session")
def weights_a():
    return rw.SpaceWeights(1.0 / 8.0, 0.4)


@pytest.fixture(scope="session")
def forced_cubic():
    """a3 = 1 + cos(phi1), d = 2."""
    a3 = rw.cosine_table_series([(0, 1.0, 0.0), (1, 1.0, 0.0)], 18)
    return rw.Nonlinearity(2, {3: a3}, 10.0)


@pytest.fixture(scope="session")
def constant_cubic():
    return rw.Nonlinearity(2, {3: rw.Series2D.constant(2.0)}, 10.0)


@pytest.fixture(scope="session")
def setup_b():
    return rw.FrequencySetup("b", 1e-4, 1e-3, omega1_value=1.6180339887498949)


@pytest.fixture(scope="session")
def dec_b(setup_b):
    return rw.Decomposition(setup_b, 4, 24, 6)


@pytest.fixture(scope="session")
def cert_b(dec_b):
    cert = rw.certify_bounds(dec_b, rw.wave_operator(dec_b.setup))
    assert cert.passes
    return cert


@pytest.fixture(scope="session")
def weights_b():
    return rw.SpaceWeights(0.05, 0.4)


@pytest.fixture(scope="session")
def saddle_constant(dec_a, cert_a, weights_a, constant_cubic):
    """Converged critical point for the constant-coefficient instance,
    found from a bare ray seed (exercises the Newton path)."""
    e_plus = rw.Series2D.cosine((0, 1), 1.0, dec_a.M1, dec_a.M2)
    return rw.find_critical_point(dec_a, constant_cubic, weights_a, cert_a,
                                  seeds=[e_plus], tol=1e-9, ball_radius=2.0)
