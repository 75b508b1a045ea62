"""End-to-end solves, residual verification, sweeps, and reporting.

The assembled solution u is checked against the unrescaled equation

    w1^2 u_11 + (w2^2 - 1) u_22 + 2 w1 w2 u_12 + f(phi1, u) = 0

in a ladder of weighted norms, and its spectrum is split into the
phi1-active and phi2-active masses that witness quasi-periodicity.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DivergenceError, SearchError, StageError
from .fourier import (Nonlinearity, Series2D, SpaceWeights, evaluate,
                      weighted_norm)
from .linking import find_critical_point, nontriviality_check
from .oscillator import continue_orbit, limit_orbit, monodromy
from .range_solver import solve_range_equation, solve_range_system
from .resonance import (FrequencySetup, accepts_eps, accepts_pair,
                        certify_bounds, wave_operator)

REPORT_SCHEMA = "resonant-waves/1"


def pde_residual(u: Series2D, setup: FrequencySetup, nl: Nonlinearity,
                 w: SpaceWeights) -> float:
    """Weighted norm of the unrescaled equation residual at u.

    The forcing is composed exactly (no mode caps), so the value includes
    the Galerkin truncation tail of the solve that produced u.
    """
    op = wave_operator(setup)
    linear = u.map_symbol(op.symbol)
    return weighted_norm(linear + nl.compose_physical(u), w)


def residual_ladder(u: Series2D, setup: FrequencySetup, nl: Nonlinearity,
                    w: SpaceWeights) -> dict:
    """Residuals in the fixed weight ladder (sigma, s), (sigma/2, s+1),
    (sigma/4, s+2)."""
    ladder = [
        SpaceWeights(w.sigma, w.s),
        SpaceWeights(w.sigma / 2.0, w.s + 1.0),
        SpaceWeights(w.sigma / 4.0, w.s + 2.0),
    ]
    return {f"sigma={lw.sigma:.6g},s={lw.s:.6g}": pde_residual(u, setup, nl, lw)
            for lw in ladder}


def quasiperiodicity_check(u: Series2D, tol: float = 1e-12) -> dict:
    """Spectral masses over phi1-active and phi2-active modes."""
    m1 = sum(abs(c) * (1 if l == (0, 0) else 2)
             for l, c in u.coeffs.items() if l[0] != 0)
    m2 = sum(abs(c) * (1 if l == (0, 0) else 2)
             for l, c in u.coeffs.items() if l[1] != 0)
    return {"m1": m1, "m2": m2, "passes": bool(m1 > tol and m2 > tol)}


@dataclass
class SolutionReport:
    case: str
    u: Series2D
    residuals: dict
    amplitude: float
    correction: float
    mass_phi1: float
    mass_phi2: float
    quasiperiodic: bool
    diagnostics: dict = field(default_factory=dict)
    schema: str = REPORT_SCHEMA

    def to_json_dict(self) -> dict:
        return {
            "schema": self.schema,
            "case": self.case,
            "u": self.u.to_json_dict(),
            "residuals": self.residuals,
            "amplitude": self.amplitude,
            "correction": self.correction,
            "mass_phi1": self.mass_phi1,
            "mass_phi2": self.mass_phi2,
            "quasiperiodic": self.quasiperiodic,
            "diagnostics": self.diagnostics,
        }


def _mean_of_leading(nl: Nonlinearity) -> float:
    return nl.coefficient(2 * nl.d - 1).get((0, 0)).real


def solve_case_b(config) -> SolutionReport:
    """Irrational-forcing pipeline: sieve, certify, limit orbit, monodromy,
    continuation at eta = delta, assembly, residual and mass checks."""
    setup = config.setup()
    nl = config.nonlinearity()
    w = config.weights()
    sieve = accepts_pair(setup.eps, setup.omega1, setup.gamma, config.lmax)
    if not sieve.accepted:
        raise StageError("sieve", f"(eps, omega1) rejected: {sieve.condition} "
                                  f"witness {sieve.witness}")
    mean_a = _mean_of_leading(nl)
    if setup.eps * mean_a <= 0.0:
        raise StageError("sign", "bifurcation sign condition "
                                 "eps * mean(a_{2d-1}) > 0 violated")
    dec = config.decomposition()
    cert = certify_bounds(dec, wave_operator(setup))
    if not cert.passes:
        raise StageError("certify", f"bound certificate failed at {cert.witness}")

    try:
        orbit = limit_orbit(nl.d, mean_a, setup.eps)
    except (ValueError, DivergenceError) as exc:
        raise StageError("orbit", str(exc))
    mono = monodromy(orbit)
    if mono["verdict"] != "non-degenerate":
        raise StageError("monodromy", "limit orbit is degenerate")

    delta = setup.delta(nl.d)
    try:
        cont = continue_orbit(dec, nl, orbit, [delta], cert,
                              tol=config.tol_newton, range_tol=config.tol_range)
        q_eta = cont["orbits"][delta]
        range_sol = solve_range_equation(dec, nl, q_eta, delta, w, cert,
                                         tol=config.tol_range,
                                         eta0_guard=config.eta0_guard)
    except (ValueError, DivergenceError) as exc:
        raise StageError("continuation", str(exc))

    u = (q_eta + range_sol.p).scale(delta)
    residuals = residual_ladder(u, setup, nl, w)
    qp = quasiperiodicity_check(u, config.tol_mass)
    reg = weighted_norm(range_sol.p.scale(delta),
                        SpaceWeights(w.sigma / 4.0, w.s + 2.0))
    diag = {
        "forcing": {"h1_budget": nl.h1_budget(),
                    "nonconstant_in_phi1": nl.nonconstant_in_phi1()},
        "sieve": {"accepted": True},
        "certify": {"min_abs_on_range": cert.min_abs_on_range,
                    "threshold": cert.threshold},
        "orbit": {"energy": orbit.energy, "scale": orbit.scale,
                  "energy_drift": orbit.energy_drift,
                  "spectral_decay_rate": orbit.spectral_decay_rate,
                  "dT_dE": orbit.dT_dE},
        "monodromy": {"trace_gap": mono["trace_gap"],
                      "distance_from_identity": mono["distance_from_identity"],
                      "verdict": mono["verdict"]},
        "continuation": cont["diagnostics"][delta],
        "range": {"iterations": range_sol.iterations,
                  "contraction_rate": range_sol.contraction_rate,
                  **range_sol.bound_diagnostics},
        "delta": delta,
        "regularity_surrogate": (reg * setup.gamma * setup.omega1 ** 3
                                 / (setup.m ** 2 * abs(setup.eps))
                                 if setup.eps else 0.0),
    }
    return SolutionReport("b", u, residuals,
                          weighted_norm(u, w),
                          weighted_norm(range_sol.p.scale(delta), w),
                          qp["m1"], qp["m2"], qp["passes"], diag)


def solve_case_a(config) -> SolutionReport:
    """Rational-forcing pipeline: sieve, certify, saddle search,
    nontriviality, assembly, residual and mass checks."""
    setup = config.setup()
    nl = config.nonlinearity()
    w = config.weights()
    sieve = accepts_eps(setup.eps, setup.gamma, config.lmax)
    if not sieve.accepted:
        raise StageError("sieve", f"eps rejected with witness {sieve.witness}")
    dec = config.decomposition()
    cert = certify_bounds(dec, wave_operator(setup))
    if not cert.passes:
        raise StageError("certify", f"bound certificate failed at {cert.witness}")

    try:
        result = find_critical_point(dec, nl, w, cert, tol=config.tol_newton,
                                     ball_radius=config.R, rng_seed=config.seed,
                                     range_tol=config.tol_range)
    except (SearchError, DivergenceError) as exc:
        raise StageError("search", str(exc))
    if not nontriviality_check(result.q1, dec, config.tol_mass):
        raise StageError("nontriviality",
                         "critical point has no phi2-only component")

    sol = solve_range_system(dec, nl, result.q1, w, cert, tol=config.tol_range)
    delta = setup.delta(nl.d)
    u = (result.q1 + sol.q2 + sol.p).scale(delta)
    residuals = residual_ladder(u, setup, nl, w)
    qp = quasiperiodicity_check(u, config.tol_mass)
    reg = weighted_norm(sol.p.scale(delta), SpaceWeights(w.sigma / 4.0, w.s + 2.0))
    diag = {
        "forcing": {"h1_budget": nl.h1_budget(),
                    "nonconstant_in_phi1": nl.nonconstant_in_phi1()},
        "sieve": {"accepted": True},
        "certify": {"min_abs_on_range": cert.min_abs_on_range,
                    "threshold": cert.threshold},
        "search": {"value": result.value, "grad_norm": result.grad_norm,
                   "minimax_estimate": result.minimax_estimate,
                   "ball_radius": result.ball_radius,
                   "seeds": result.seed_traces},
        "range": {"iterations": sol.iterations,
                  "contraction_rate": sol.contraction_rate,
                  **sol.bound_diagnostics},
        "delta": delta,
        "regularity_surrogate": (reg * setup.gamma * setup.omega1 ** 3
                                 / (setup.m ** 2 * abs(setup.eps))
                                 if setup.eps else 0.0),
    }
    return SolutionReport("a", u, residuals,
                          weighted_norm(u, w),
                          weighted_norm(sol.p.scale(delta), w),
                          qp["m1"], qp["m2"], qp["passes"], diag)


def solve(config) -> SolutionReport:
    return solve_case_a(config) if config.case == "a" else solve_case_b(config)


@dataclass
class ScanReport:
    case: str
    rows: list
    amplitude_slope: float
    correction_slope: float
    expected_amplitude_slope: float
    expected_correction_slope: float
    schema: str = REPORT_SCHEMA

    def to_json_dict(self) -> dict:
        return {
            "schema": self.schema,
            "case": self.case,
            "rows": self.rows,
            "amplitude_slope": self.amplitude_slope,
            "correction_slope": self.correction_slope,
            "expected_amplitude_slope": self.expected_amplitude_slope,
            "expected_correction_slope": self.expected_correction_slope,
        }


def scaling_scan(config) -> ScanReport:
    """Amplitude/correction scaling across an accepted detuning grid.

    Fits log-log slopes of |u| and |u - delta*qbar_eps| against |eps|;
    for leading power 2d-1 the expected exponents are 1/(2(d-1)) and
    (2d-1)/(2(d-1)).
    """
    if not config.eps_grid:
        raise ConfigError("scan requires eps_grid")
    accepted = []
    for eps in config.eps_grid:
        if config.case == "a":
            ok = accepts_eps(eps, config.gamma, config.lmax).accepted
        else:
            ok = accepts_pair(eps, config.omega1, config.gamma,
                              config.lmax).accepted
        if ok:
            accepted.append(eps)
    span = (max(abs(e) for e in accepted) / min(abs(e) for e in accepted)
            if accepted else 0.0)
    if len(accepted) < 4 or span < 10.0 ** 1.5:
        raise StageError("scan-grid",
                         f"need >= 4 accepted points spanning >= 1.5 decades; "
                         f"got {len(accepted)} spanning {math.log10(span) if span else 0:.2f}")
    rows = []
    for eps in accepted:
        rep = solve(replace(config, eps=eps))
        rows.append({"eps": eps, "amplitude": rep.amplitude,
                     "correction": rep.correction,
                     "residual": min(rep.residuals.values())})
    logs = np.log10([abs(r["eps"]) for r in rows])
    amp_slope = float(np.polyfit(logs, np.log10([r["amplitude"] for r in rows]), 1)[0])
    corr_slope = float(np.polyfit(logs, np.log10([r["correction"] for r in rows]), 1)[0])
    d = config.d
    return ScanReport(config.case, rows, amp_slope, corr_slope,
                      1.0 / (2.0 * (d - 1)), (2.0 * d - 1.0) / (2.0 * (d - 1)))


# -- exporters ---------------------------------------------------------------


def write_json_report(obj, path: str) -> None:
    payload = obj.to_json_dict() if hasattr(obj, "to_json_dict") else obj
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_sieve_csv(points, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case", "eps", "omega1", "gamma", "Lmax",
                         "accepted", "witness_l1", "witness_l2"])
        for p in points:
            w1, w2 = p.witness if p.witness else ("", "")
            writer.writerow([p.case, repr(p.eps), repr(p.omega1), repr(p.gamma),
                             p.lmax, int(p.accepted), w1, w2])


def write_scan_csv(report: ScanReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "amplitude", "correction", "residual"])
        for r in report.rows:
            writer.writerow([repr(r["eps"]), repr(r["amplitude"]),
                             repr(r["correction"]), repr(r["residual"])])


def write_orbit_csv(orbit, path: str, n: int = 1024) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi2", "qbar"])
        for k in range(n):
            phi = 2.0 * math.pi * k / n
            writer.writerow([repr(phi), repr(evaluate(orbit.qbar, 0.0, phi))])
