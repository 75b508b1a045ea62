"""The limit oscillator: period map, 2pi-periodic orbit, monodromy.

For irrational forcing the kernel equation collapses, at vanishing
amplitude, to (2+eps) q'' + <a> q^{2d-1} = 0.  The period decreases
strictly with energy, so one orbit is 2pi-periodic; anisochronicity makes
it non-degenerate up to translations (parabolic monodromy), the
hypothesis the continuation needs.
"""

import math

import numpy as np

import resonant_waves as rw

d = 2
I = rw.orbit_integral(d)
print(f"I_{d} = {I:.10f}  (Beta closed form {rw.orbit_integral_closed_form(d):.10f})")

E = rw.energy_for_period(d)
print(f"E* = {E:.10f} with T(E*) - 2pi = {rw.period(E, d) - 2 * math.pi:.2e}")
print(f"dT/dE at E* = {rw.period_derivative(E, d):.6f} < 0 (anisochronous)")
print(f"isochronous control: T(E) = {rw.period(1.0, 1):.12f} = pi sqrt(2) for d = 1")

orbit = rw.limit_orbit(d, mean_a=2.0, eps=1e-4)
print(f"\norbit scale c = {orbit.scale:.6f}, amplitude qbar(0) = "
      f"{rw.evaluate(orbit.qbar, 0.0, 0.0):.6f}")
print(f"energy drift over one period: {orbit.energy_drift:.2e}")
print(f"spectral decay rate: {orbit.spectral_decay_rate:.3f} per harmonic "
      "(analytic orbit)")
print("leading harmonics (cosine amplitudes):")
for (_, j), c in sorted(orbit.qbar.coeffs.items())[:5]:
    print(f"  j = {j}: {2 * c.real:+.8f}")

lap = orbit.qbar.map_symbol(lambda l: -float(l[1] ** 2)).scale(2.0 + orbit.eps)
res = lap + rw.power(orbit.qbar, 3).scale(2.0)
print("collocation residual of the limit equation:",
      f"{np.abs(rw.evaluate_grid(res, 1, 256)).max():.2e}")

rep = rw.monodromy(orbit)
print(f"\nmonodromy: trace gap {rep['trace_gap']:.2e}, "
      f"||M - I|| = {rep['distance_from_identity']:.3f} -> {rep['verdict']}")
qp, qpp = orbit.qbar_derivative_initial()
vec = np.array([qp, qpp])
print("Floquet fixed vector residual:",
      f"{np.linalg.norm(rep['M'] @ vec - vec):.2e}")

control = rw.limit_orbit(1, 1.0, 0.0, _allow_isochronous=True)
print("isochronous d = 1 control verdict:", rw.monodromy(control)["verdict"])

rw.write_orbit_csv(orbit, "orbit.csv")
print("\nwrote orbit.csv (phi2, qbar on 1024 points)")
