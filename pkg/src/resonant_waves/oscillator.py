"""Limit oscillator of the kernel equation and its continuation.

When the forcing frequency is irrational, projecting the rescaled wave
equation onto phi2-only functions and letting the amplitude parameter go
to zero leaves the one-degree-of-freedom system

    (2 + eps) q'' + <a> q^{2d-1} = 0,       <a> = mean of a_{2d-1},

whose orbits are analytic and periodic.  The period decreases strictly
with energy for d >= 2, so exactly one orbit is 2pi-periodic; it is
non-degenerate up to translations (parabolic monodromy), which lets a
bordered Newton continue it to the full kernel equation for small
amplitude parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DivergenceError, SupportError
from .fourier import (Nonlinearity, Series2D, SpaceWeights, TruncationPolicy,
                      derivative, inner, mean, multiply, power, weighted_norm)
from .resonance import (Certificate, Decomposition, certify_bounds,
                        invert_on_range, project, setup_with_eps, wave_operator)
from .range_solver import solve_range_equation

#: Fixed-step orbit integration: 8th-order symmetric composition of leapfrog.
ORBIT_STEPS = 4096
ORBIT_HARMONICS = 32

# Yoshida's 8th-order composition coefficients (solution A); the middle
# coefficient closes the telescoping sum to 1.
_W = (-1.61582374150097, -2.44699182370524, -0.00716989419708120,
      2.44002732616735, 0.157739928123617, 1.82020630970714,
      1.04242620869991)
_W0 = 1.0 - 2.0 * sum(_W)
_STAGES = tuple(reversed(_W)) + (_W0,) + _W


@dataclass
class LimitOrbit:
    """The 2pi-periodic orbit of the limit equation, with diagnostics."""

    d: int
    mean_a: float
    eps: float
    energy: float          # E* with T(E*) = 2pi in the reference normalization
    scale: float           # c with qbar = c * reference orbit
    qbar: Series2D         # phi2-only series, maximum at phi2 = 0
    monodromy: np.ndarray  # 2x2 time-2pi map of the linearized equation
    dT_dE: float
    energy_drift: float
    spectral_decay_rate: float

    def qbar_derivative_initial(self) -> tuple[float, float]:
        """(qbar'(0), qbar''(0)) from the stored spectrum."""
        qp = 0.0
        qpp = 0.0
        for l, c in self.qbar.coeffs.items():
            j = l[1]
            # d/dphi2 of 2 Re(c e^{i j phi2}) evaluated at 0
            qp += -2.0 * j * c.imag
            qpp += -2.0 * j * j * c.real
        return qp, qpp


def orbit_integral(d: int, n_nodes: int = 80) -> float:
    """I_d = int_0^1 dx / sqrt(2 (1 - x^{2d})) by Gauss-Jacobi quadrature.

    The endpoint square-root singularity is absorbed into the weight
    (1-x)^{-1/2} after factoring 1 - x^{2d} = (1-x) P(x).
    """
    if d < 1:
        raise ValueError("d >= 1 required")
    nodes, weights = special.roots_jacobi(n_nodes, -0.5, 0.0)
    x = 0.5 * (nodes + 1.0)
    # P(x) = 1 + x + ... + x^{2d-1}
    P = np.polyval(np.ones(2 * d), x)
    return 0.5 * float(weights @ (P ** -0.5))


def orbit_integral_closed_form(d: int) -> float:
    """Beta-function value Gamma(1/2d) Gamma(1/2) / (2d sqrt(2) Gamma(1/2d + 1/2))."""
    a = 1.0 / (2.0 * d)
    return special.gamma(a) * special.gamma(0.5) / (2.0 * d * math.sqrt(2.0)
                                                    * special.gamma(a + 0.5))


def period(E: float, d: int) -> float:
    """Period T(E) = 4 E^{1/(2d) - 1/2} I_d of the reference oscillator."""
    if E <= 0:
        raise ValueError("E > 0 required")
    return 4.0 * E ** (1.0 / (2.0 * d) - 0.5) * orbit_integral(d)


def period_derivative(E: float, d: int) -> float:
    """dT/dE = 2 (1/d - 1) E^{1/(2d) - 3/2} I_d; strictly negative for d > 1."""
    if E <= 0:
        raise ValueError("E > 0 required")
    return 2.0 * (1.0 / d - 1.0) * E ** (1.0 / (2.0 * d) - 1.5) * orbit_integral(d)


def energy_for_period(d: int, target: float = 2.0 * math.pi) -> float:
    """Unique E with T(E) = target, by bracketed bisection plus Newton polish."""
    if d < 2:
        raise ValueError("d >= 2 required (d = 1 is isochronous)")
    lo, hi = 1e-8, 1e8
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if period(mid, d) > target:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-6:
            break
    E = math.sqrt(lo * hi)
    for _ in range(60):
        step = (period(E, d) - target) / period_derivative(E, d)
        E -= step
        if abs(step) <= 1e-16 * E:
            break
    return E


@lru_cache(maxsize=None)
def _reference_orbit(d: int, n_steps: int = ORBIT_STEPS,
                     n_harmonics: int = ORBIT_HARMONICS):
    """Integrate x'' = -x^{2d-1} (d = 1: harmonic control) over one period.

    Returns (cos coefficients by harmonic, monodromy, amplitude, drift,
    decay rate).  The 2x2 tangent map is propagated through the same
    composition stages, so the monodromy is the exact derivative of the
    numerical flow.
    """
    if d >= 2:
        Estar = energy_for_period(d)
        amplitude = (2 * d) ** (1.0 / (2 * d - 2)) * Estar ** (1.0 / (2 * d))
    else:
        amplitude = 1.0
    h = 2.0 * math.pi / n_steps
    x, v = amplitude, 0.0
    # tangent columns (h, h') with P(0) = I
    p11, p12, p21, p22 = 1.0, 0.0, 0.0, 1.0
    e0 = 0.5 * v * v + x ** (2 * d) / (2 * d)
    drift = 0.0
    samples = np.empty(n_steps)
    expo = 2 * d - 1
    dexpo = 2 * d - 2
    curv = float(expo)
    for step in range(n_steps):
        samples[step] = x
        for wcoef in _STAGES:
            dt = wcoef * h
            half = 0.5 * dt
            a = -x ** expo
            g = -curv * x ** dexpo
            v += half * a
            p21 += half * g * p11
            p22 += half * g * p12
            x += dt * v
            p11 += dt * p21
            p12 += dt * p22
            a = -x ** expo
            g = -curv * x ** dexpo
            v += half * a
            p21 += half * g * p11
            p22 += half * g * p12
        e = 0.5 * v * v + x ** (2 * d) / (2 * d)
        drift = max(drift, abs(e - e0))
    drift /= e0
    M = np.array([[p11, p12], [p21, p22]])

    # the exact orbit is antiperiodic over half a period (even potential);
    # symmetrizing removes integrator noise on the even harmonics
    if n_steps % 2 == 0:
        samples = 0.5 * (samples - np.roll(samples, n_steps // 2))
    spectrum = np.fft.rfft(samples) / n_steps
    coeffs = {}
    lead = abs(spectrum[1])
    for j in range(1, min(n_harmonics, n_steps // 2)):
        c = spectrum[j]
        if abs(c) > 1e-17 * lead:
            coeffs[j] = complex(c)
    mags = sorted(((j, abs(c)) for j, c in coeffs.items() if abs(c) > 1e-14 * lead))
    if len(mags) >= 2:
        (j0, m0), (j1, m1) = mags[0], mags[-1]
        decay = (math.log(m0) - math.log(m1)) / (j1 - j0)
    else:
        decay = math.inf
    return coeffs, M, amplitude, drift, decay


def limit_orbit(d: int, mean_a: float, eps: float,
                n_harmonics: int = ORBIT_HARMONICS,
                _allow_isochronous: bool = False) -> LimitOrbit:
    """The 2pi-periodic solution of (2+eps) q'' + <a> q^{2d-1} = 0.

    The orbit is normalized to attain its maximum at phi2 = 0 with
    q'(0) = 0; for the symmetric potential only odd cosine harmonics are
    present.  Requires the bifurcation sign condition eps * <a> > 0 (for
    eps = 0 only <a> != 0), and d >= 2 unless the isochronous d = 1
    control case is explicitly requested.
    """
    if d < 2 and not _allow_isochronous:
        raise ValueError("d >= 2 required")
    if mean_a == 0.0:
        raise ValueError("mean of the leading coefficient must be nonzero")
    if eps != 0.0 and eps * mean_a <= 0.0:
        raise ValueError("sign condition eps * mean(a_{2d-1}) > 0 violated")
    a_eff = abs(mean_a)
    coeffs, M, amplitude, drift, decay = _reference_orbit(d, ORBIT_STEPS, n_harmonics)
    if drift > 1e-10:
        raise DivergenceError(f"orbit integrator energy drift {drift:.3e} > 1e-10")
    if d >= 2:
        c = ((2.0 + eps) / a_eff) ** (1.0 / (2.0 * d - 2.0))
        Estar = energy_for_period(d)
        dtde = period_derivative(Estar, d)
    else:
        c, Estar, dtde = 1.0, 1.0, 0.0
    qbar = Series2D(0, n_harmonics, {(0, j): c * v for j, v in coeffs.items()})
    return LimitOrbit(d, mean_a, eps, Estar, c, qbar, M, dtde, drift, decay)


def monodromy(orbit: LimitOrbit) -> dict:
    """Non-degeneracy verdict from the time-2pi map of the linearization.

    A non-degenerate orbit is parabolic with a single Jordan block:
    trace within 1e-6 of 2 but the map measurably different from the
    identity (one-dimensional space of periodic solutions).
    """
    M = orbit.monodromy
    trace_gap = abs(M[0, 0] + M[1, 1] - 2.0)
    dist_id = float(np.linalg.norm(M - np.eye(2)))
    verdict = "non-degenerate" if (trace_gap < 1e-6 and dist_id > 1e-3) else "degenerate"
    return {"M": M, "trace_gap": trace_gap, "distance_from_identity": dist_id,
            "verdict": verdict}


# -- continuation of the kernel equation -------------------------------------


def _series_to_vec(q: Series2D, mq: int) -> np.ndarray:
    out = np.empty(2 * mq + 1)
    out[0] = q.get((0, 0)).real
    for j in range(1, mq + 1):
        c = q.get((0, j))
        out[2 * j - 1] = c.real
        out[2 * j] = c.imag
    return out


def _vec_to_series(x: np.ndarray, mq: int, box2: int) -> Series2D:
    coeffs = {(0, 0): complex(x[0])} if x[0] else {}
    for j in range(1, mq + 1):
        c = complex(x[2 * j - 1], x[2 * j])
        if c != 0:
            coeffs[(0, j)] = c
    return Series2D(0, box2, coeffs)


def _kernel_residual(dec: Decomposition, nl: Nonlinearity, q: Series2D,
                     p: Series2D, eta: float, policy: TruncationPolicy) -> Series2D:
    lap = q.map_symbol(lambda l: -float(l[1] ** 2)).scale(2.0 + dec.setup.eps)
    fu = nl.compose(q + p, eta, policy)
    return lap + project(dec, fu, "kernel")


def continue_orbit(dec: Decomposition, nl: Nonlinearity, orbit: LimitOrbit,
                   eta_targets, cert: Certificate, tol: float = 1e-11,
                   max_newton: int = 40, range_tol: float = 1e-13) -> dict:
    """Continue the limit orbit in the amplitude parameter eta.

    For each target (visited through a geometric ladder of ratio 2,
    warm-started), a bordered Newton solves the kernel equation

        (2+eps) q'' + [f(phi1, q + p(eta, q), eta)]_kernel = 0

    together with the phase condition <q - qbar, qbar'>_{L2} = 0 that
    removes the translation family.  Returns per-target orbits and the
    deviation diagnostics |q_eta - qbar|_{H^sigma} / eta.
    """
    verdict = monodromy(orbit)["verdict"]
    if verdict != "non-degenerate":
        raise DivergenceError("limit orbit is degenerate; cannot continue")
    mq = min(orbit.qbar.M2, dec.M2)
    policy = TruncationPolicy(cap1=dec.M1, cap2=dec.M2)
    qbar = orbit.qbar
    qbar_dot = derivative(qbar, 2)
    dot_vec = _series_to_vec(qbar_dot, mq)
    # pairing weights: the mean pairs with weight 1, each harmonic dof with 2
    pair_w = np.array([1.0] + [2.0] * (2 * mq))
    phase_row = dot_vec * pair_w
    sig = SpaceWeights(0.05, 0.0)

    def solve_at(eta: float, q_start: Series2D) -> Series2D:
        x = _series_to_vec(q_start, mq)
        xbar = _series_to_vec(qbar, mq)
        mu = 0.0
        for _ in range(max_newton):
            q = _vec_to_series(x, mq, dec.M2)
            p = solve_range_equation(dec, nl, q, eta, sig, cert,
                                     tol=range_tol).p
            res_series = _kernel_residual(dec, nl, q, p, eta, policy)
            res = _series_to_vec(res_series, mq)
            res_b = np.append(res + mu * dot_vec, phase_row @ (x - xbar))
            if np.max(np.abs(res_b)) <= tol:
                return q
            dim = 2 * mq + 1
            J = np.zeros((dim + 1, dim + 1))
            step = 1e-7 * max(1.0, float(np.max(np.abs(x))))
            base = res
            for i in range(dim):
                xp = x.copy()
                xp[i] += step
                qp = _vec_to_series(xp, mq, dec.M2)
                rp = _series_to_vec(_kernel_residual(dec, nl, qp, p, eta, policy), mq)
                J[:dim, i] = (rp - base) / step
            J[dim, :dim] = phase_row
            J[:dim, dim] = dot_vec
            upd = np.linalg.lstsq(J, -res_b, rcond=None)[0]
            x = x + upd[:dim]
            mu = mu + upd[dim]
        raise DivergenceError(f"continuation Newton stagnated at eta = {eta:g}")

    results = {}
    diagnostics = {}
    for target in sorted(set(float(t) for t in eta_targets)):
        if target == 0.0:
            results[target] = qbar
            diagnostics[target] = {"deviation": 0.0, "ratio": 0.0}
            continue
        ladder = [target / 2 ** k for k in range(3, -1, -1)]
        q = qbar
        for eta in ladder:
            q = solve_at(eta, q)
        results[target] = q
        dev = weighted_norm(q - qbar, sig)
        diagnostics[target] = {"deviation": dev, "ratio": dev / target}
    return {"orbits": results, "diagnostics": diagnostics}


# -- even-power obstruction ---------------------------------------------------


@dataclass
class ObstructionReport:
    D: int
    mean_a: float
    rows: list            # (eps, rho, h)
    root_free: bool


def even_power_obstruction(a_series: Series2D, D: int, dec: Decomposition,
                           rho_grid, eps_list, mw: int = 8,
                           tol: float = 1e-12) -> ObstructionReport:
    """Obstruction scan for an even leading power f = a(phi1) u^D.

    After rescaling by |eps|^{1/(D-1)} the range equation is solved by
    contraction with prefactor |eps|; the kernel unknown splits into a
    constant rho plus a zero-mean correction w solved by Newton.  The
    remaining scalar equation h(rho) = <a (rho + w + p)^D> = 0 has no
    small roots when <a> != 0: the report checks |h| >= |<a>|/2 rho^D and
    constant sign over the grid.
    """
    if D < 2 or D % 2 != 0:
        raise ValueError("D must be an even power >= 2")
    if any(l[1] != 0 for l in a_series.coeffs):
        raise SupportError("a must depend on phi1 only")
    mean_a = mean(a_series)
    if mean_a == 0.0:
        raise ValueError("mean of a must be nonzero")
    policy = TruncationPolicy(cap1=dec.M1, cap2=dec.M2)
    w0 = SpaceWeights(0.0, 0.0)
    rows = []
    for eps in eps_list:
        setup_e = setup_with_eps(dec.setup, eps)
        dec_e = Decomposition(setup_e, dec.M1, dec.M2, dec.N)
        op_e = wave_operator(setup_e)
        cert = certify_bounds(dec_e, op_e)
        if not cert.passes:
            raise DivergenceError(f"eps = {eps:g} is not certified")

        def solve_p(q: Series2D) -> Series2D:
            p = Series2D.zero(dec.M1, dec.M2)
            for _ in range(80):
                fu = multiply(a_series, power(q + p, D, policy), policy)
                p_new = invert_on_range(dec_e, op_e, project(dec_e, fu, "range"),
                                        cert).scale(abs(eps))
                if weighted_norm(p_new - p, w0) <= tol:
                    return p_new
                p = p_new
            raise DivergenceError("range contraction stalled in obstruction scan")

        for rho in rho_grid:
            if rho == 0.0:
                continue
            w = Series2D.zero(0, mw)
            for _ in range(30):
                q = Series2D.constant(rho, 0, dec.M2) + w
                p = solve_p(q)
                fu = multiply(a_series, power(q + p, D, policy), policy)
                proj = project(dec_e, fu, "kernel")
                g = proj - Series2D.constant(mean(proj), 0, dec.M2)
                res_series = w.map_symbol(lambda l: -float(l[1] ** 2)).scale(2.0 + eps) + g
                res = _series_to_vec(res_series, mw)[1:]
                if np.max(np.abs(res), initial=0.0) <= tol:
                    break
                dim = 2 * mw
                J = np.zeros((dim, dim))
                xw = _series_to_vec(w, mw)[1:]
                step = 1e-7 * max(1.0, float(np.max(np.abs(xw), initial=0.0)), abs(rho))
                for i in range(dim):
                    xp = xw.copy()
                    xp[i] += step
                    wp = _vec_to_series(np.concatenate(([0.0], xp)), mw, dec.M2)
                    qp = Series2D.constant(rho, 0, dec.M2) + wp
                    fup = multiply(a_series, power(qp + p, D, policy), policy)
                    projp = project(dec_e, fup, "kernel")
                    gp = projp - Series2D.constant(mean(projp), 0, dec.M2)
                    rsp = wp.map_symbol(lambda l: -float(l[1] ** 2)).scale(2.0 + eps) + gp
                    J[:, i] = (_series_to_vec(rsp, mw)[1:] - res) / step
                upd = np.linalg.solve(J, -res)
                xw = xw + upd
                w = _vec_to_series(np.concatenate(([0.0], xw)), mw, dec.M2)
            else:
                raise DivergenceError(f"inner Newton stalled at rho = {rho:g}")
            q = Series2D.constant(rho, 0, dec.M2) + w
            p = solve_p(q)
            h = mean(multiply(a_series, power(q + p, D, policy), policy))
            rows.append((float(eps), float(rho), float(h)))

    hs = [h for _, _, h in rows]
    root_free = all(abs(h) >= 0.5 * abs(mean_a) * rho ** D for _, rho, h in rows)
    root_free = root_free and (all(h > 0 for h in hs) or all(h < 0 for h in hs))
    return ObstructionReport(D, mean_a, rows, root_free)
