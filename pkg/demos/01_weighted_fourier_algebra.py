"""Weighted Fourier algebra on the two-torus.

Builds a few truncated real series, takes the weighted l^1 norms that
control all solver estimates, multiplies series exactly by Cauchy
convolution, and composes an analytic nonlinearity.
"""

import numpy as np

import resonant_waves as rw

# 2 cos(phi2): one conjugate mode pair, stored as its canonical half
u = rw.Series2D.cosine((0, 1), 2.0)
print("series:", u)
print("coefficients:", dict(u.coeffs))

# the norm weights l2 exponentially and l1 algebraically
for sigma, s in [(0.0, 0.0), (0.1, 0.5), (0.7, 0.5)]:
    w = rw.SpaceWeights(sigma, s)
    print(f"|u|_({sigma},{s}) = {rw.weighted_norm(u, w):.6f}")

# products satisfy |uv| <= 2^s |u| |v|; at s = 0 the square of 2 cos(phi2)
# attains equality
sq = rw.multiply(u, u)
print("\n(2 cos phi2)^2 coefficients:", dict(sq.coeffs))
w0 = rw.SpaceWeights(0.0, 0.0)
print("equality witness:", rw.weighted_norm(sq, w0), "=",
      rw.weighted_norm(u, w0) ** 2)

rng = np.random.default_rng(0)
w = rw.SpaceWeights(0.3, 0.45)
worst = 0.0
for _ in range(200):
    coeffs = {(int(rng.integers(-4, 5)), int(rng.integers(-6, 7))):
              complex(rng.normal(), rng.normal()) for _ in range(6)}
    a = rw.Series2D(4, 6, coeffs)
    coeffs = {(int(rng.integers(-4, 5)), int(rng.integers(-6, 7))):
              complex(rng.normal(), rng.normal()) for _ in range(6)}
    b = rw.Series2D(4, 6, coeffs)
    ratio = rw.weighted_norm(rw.multiply(a, b), w) / (
        2 ** w.s * rw.weighted_norm(a, w) * rw.weighted_norm(b, w))
    worst = max(worst, ratio)
print(f"200 random products: max |uv| / (2^s |u||v|) = {worst:.4f} <= 1")

# composition with a forcing nonlinearity a3(phi1) u^3
a3 = rw.cosine_table_series([(0, 1.0, 0.0), (1, 1.0, 0.0)], 2)  # 1 + cos phi1
nl = rw.Nonlinearity(2, {3: a3}, radius=10.0)
f = nl.compose(rw.Series2D.cosine((0, 1), 1.0), delta=0.0)
print("\n(1 + cos phi1) cos^3 phi2 spectrum:")
for l, c in sorted(f.coeffs.items()):
    print(f"  mode {l}: {c.real:+.6f}")
print("point check at (0.7, 1.3):",
      rw.evaluate(f, 0.7, 1.3), "vs",
      (1 + np.cos(0.7)) * np.cos(1.3) ** 3)
