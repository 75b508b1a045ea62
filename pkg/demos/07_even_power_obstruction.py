"""Why the leading power must be odd: the even-power obstruction.

For f = a(phi1) u^D with D even and mean(a) != 0, the reduced scalar
equation h(rho) = <a (rho + w + p)^D> = <a> rho^D + o(rho^D) has no small
roots, so no small solutions exist.  The probe solves the inner problems
and scans h over a radius grid for several certified detunings.
"""

import numpy as np

import resonant_waves as rw

setup = rw.FrequencySetup("b", 1e-4, 1e-3, omega1_value=1.6180339887498949)
dec = rw.Decomposition(setup, 4, 12, 4)
a = rw.cosine_table_series([(0, 1.0, 0.0), (1, 1.0, 0.0)], 4)  # 1 + cos phi1

report = rw.even_power_obstruction(
    a, D=2, dec=dec,
    rho_grid=np.geomspace(1e-3, 1e-1, 7),
    eps_list=[1e-4, 5e-5, 2.5e-5])

print(f"D = {report.D}, <a> = {report.mean_a}")
print(f"{'eps':>10} {'rho':>10} {'h(rho)':>14} {'h/rho^D':>10}")
for eps, rho, h in report.rows:
    print(f"{eps:>10.1e} {rho:>10.1e} {h:>14.6e} {h / rho ** 2:>10.4f}")
print(f"\nobstruction bounded below by |<a>|/2 rho^D with constant sign: "
      f"root_free = {report.root_free}")

try:
    rw.even_power_obstruction(a, 3, dec, [1e-2], [1e-4])
except ValueError as exc:
    print(f"odd powers are rejected: {exc}")
