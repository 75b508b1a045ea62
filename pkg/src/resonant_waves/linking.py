"""Reduced action functional and its linking saddle point (rational forcing).

After the range components (q2, p) are solved as functions of the Galerkin
kernel datum q1, the remaining finite-dimensional equation is the
Euler-Lagrange equation of the reduced functional

    value(q1) = A(q1) - int a_{2d-1} q1^{2d} / 2d + remainder(q1),

where the quadratic form A is positive definite on the phi2-only kernel
modes and negative definite on the counter-propagating family.  The
functional is extended outside the solve ball by a smooth cutoff on the
remainder, its saddle geometry (sphere in the positive family against the
boundary of a cylinder spanning the negative one) is verified by sampling,
and a deflated damped Newton locates the nontrivial critical point.

The gradient reported here is the L^2 gradient of ``value`` (finite
differences of the value reproduce it); the projected equation residual
L1 q1 + [f]_kernel_low is exactly its negative, so they vanish together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, SearchError
from .fourier import (Nonlinearity, Series2D, SpaceWeights, TruncationPolicy,
                      evaluate_grid, h1_component_norm, inner, integral,
                      weighted_norm)
from .range_solver import RangeSolution, solve_range_system
from .resonance import Certificate, Decomposition, kernel_operator, project


@dataclass
class FunctionalValue:
    value: float
    quadratic_part: float
    potential_part: float
    remainder: float
    gradient: Series2D
    alpha_plus: float
    alpha_minus: float
    range_solution: RangeSolution


@dataclass
class LinkingGeometry:
    rho: float
    omega_level: float
    r1: float
    r2: float
    e_plus: Series2D
    n_sphere: int = 48
    n_boundary: int = 48

    def __post_init__(self):
        if not (self.r1 > self.rho and self.r2 > self.rho):
            raise ValueError("cylinder dimensions must exceed the sphere radius")
        if self.omega_level <= 0:
            raise ValueError("the level omega must be positive")


@dataclass
class GeometryReport:
    min_on_sphere: float
    max_on_boundary: float
    omega_level: float
    passes: bool
    violating_sample: dict | None = None


@dataclass
class SearchResult:
    q1: Series2D
    value: float
    grad_norm: float
    minimax_estimate: float
    ball_radius: float
    seed_traces: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "q1": self.q1.to_json_dict(),
            "value": self.value,
            "grad_norm": self.grad_norm,
            "minimax_estimate": self.minimax_estimate,
            "ball_radius": self.ball_radius,
            "seeds": self.seed_traces,
        }


def _quad_coefficient(dec: Decomposition, l) -> float:
    eps = dec.setup.eps
    return (2.0 + eps) / 2.0 * l[1] * l[1] + dec.setup.omega1 * l[0] * l[1]


def quadratic_form(dec: Decomposition, q: Series2D) -> float:
    """A(q) = int (2+eps)/2 (d2 q)^2 + omega1 (d1 q)(d2 q) via Parseval."""
    acc = 0.0
    for l, c in q.coeffs.items():
        mult = 1.0 if l == (0, 0) else 2.0
        acc += mult * _quad_coefficient(dec, l) * abs(c) ** 2
    return 4.0 * math.pi ** 2 * acc


def _alpha_range(dec: Decomposition, family: str):
    """Per-mode Rayleigh quotients 2 A(pair)/|pair|_H1^2 over the Galerkin head."""
    vals = []
    for j in range(1, dec.N + 1):
        if family == "kernel_pos":
            l = (0, j)
        else:
            v1, v2 = dec.minus_vector
            l = (j * v1, j * v2)
            if not dec.in_box(l):
                continue
        q = 2.0 * 4.0 * math.pi ** 2 * _quad_coefficient(dec, l) / (1.0 + j * j)
        vals.append(q if family == "kernel_pos" else -q)
    return vals


def reduced_functional(dec: Decomposition, nl: Nonlinearity, q1: Series2D,
                       w: SpaceWeights, cert: Certificate,
                       tol: float = 1e-13, ball_radius: float | None = None,
                       ) -> FunctionalValue:
    """Value, parts, and L^2 gradient of the reduced functional at q1."""
    sol = solve_range_system(dec, nl, q1, w, cert, tol=tol,
                             ball_radius=ball_radius)
    policy = TruncationPolicy(cap1=dec.M1, cap2=dec.M2)
    u = q1 + sol.q2 + sol.p
    delta = dec.setup.delta(nl.d)

    quad = quadratic_form(dec, q1)
    pot = integral(nl.compose_potential(q1, 0.0, policy))
    fu = nl.compose(u, delta, policy)
    rem = (pot - integral(nl.compose_potential(u, delta, policy))
           + 0.5 * inner(fu, sol.q2 + sol.p))
    value = quad - pot + rem

    kop = kernel_operator(dec.setup)
    grad = project(dec, q1.map_symbol(kop.rule) + fu, "kernel_low").scale(-1.0)

    qp = project(dec, q1, "kernel_pos")
    qm = project(dec, q1, "kernel_neg")
    hp = h1_component_norm(qp, dec)
    hm = h1_component_norm(qm, dec)
    ap = (2.0 * quadratic_form(dec, qp) / hp ** 2 if hp > 0
          else min(_alpha_range(dec, "kernel_pos")))
    am = (-2.0 * quadratic_form(dec, qm) / hm ** 2 if hm > 0
          else min(_alpha_range(dec, "kernel_neg"), default=0.0))
    return FunctionalValue(value, quad, pot, rem, grad, ap, am, sol)


def cutoff(x: float) -> float:
    """Quintic-smoothstep cutoff: 1 on x <= 1, 0 on x >= 4, |slope| <= 15/24."""
    if x <= 1.0:
        return 1.0
    if x >= 4.0:
        return 0.0
    t = (x - 1.0) / 3.0
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def bare_functional(dec: Decomposition, nl: Nonlinearity, q1: Series2D) -> float:
    """Gamma(q1) = A(q1) - int F(phi1, q1, 0): no range solve involved."""
    policy = TruncationPolicy(cap1=None, cap2=None)
    return (quadratic_form(dec, q1)
            - integral(nl.compose_potential(q1, 0.0, policy)))


def extended_functional(dec: Decomposition, nl: Nonlinearity, q1: Series2D,
                        w: SpaceWeights, R: float, cert: Certificate,
                        tol: float = 1e-13) -> float:
    """Gamma + cutoff(|q1|_H1^2/R^2) * remainder; equals the reduced value
    inside the R-ball and the bare Gamma outside the 2R-ball."""
    x = (h1_component_norm(q1, dec) / R) ** 2
    lam = cutoff(x)
    if lam == 0.0:
        return bare_functional(dec, nl, q1)
    fv = reduced_functional(dec, nl, q1, w, cert, tol=tol)
    return fv.quadratic_part - fv.potential_part + lam * fv.remainder


# -- saddle geometry ---------------------------------------------------------


def _unit_pos(dec: Decomposition, rng, concentrate: float = 1.5) -> Series2D:
    """Random H^1-unit element of the positive kernel family, concentrated
    on low harmonics so that l^1 and H^1 norms stay comparable."""
    coeffs = {}
    for j in range(1, dec.N + 1):
        scale = (1.0 + j * j) ** (-concentrate)
        coeffs[(0, j)] = complex(rng.normal(0, scale), rng.normal(0, scale))
    q = Series2D(dec.M1, dec.M2, coeffs)
    return q.scale(1.0 / h1_component_norm(q, dec))


def _unit_neg_mean(dec: Decomposition, rng, concentrate: float = 1.5) -> Series2D:
    v1, v2 = dec.minus_vector
    coeffs = {(0, 0): complex(rng.normal(0, 1.0), 0.0)}
    for k in range(1, dec.N + 1):
        l = (-k * v1, -k * v2)
        if dec.in_box(l):
            scale = (1.0 + k * k) ** (-concentrate)
            coeffs[l] = complex(rng.normal(0, scale), rng.normal(0, scale))
    q = Series2D(dec.M1, dec.M2, coeffs)
    return q.scale(1.0 / h1_component_norm(q, dec))


def default_geometry(dec: Decomposition, nl: Nonlinearity, w: SpaceWeights,
                     cert: Certificate, R: float, rng_seed: int = 0,
                     n_sphere: int = 48, n_boundary: int = 48) -> LinkingGeometry:
    """Numerically calibrated saddle geometry.

    The sphere radius maximizes the predicted lower envelope
    alpha_+ rho^2/2 - kappa rho^{2d} (capped inside the solve ball); the
    level omega is half that value; the cylinder dimensions are grown
    until the superquadratic term dominates, and beyond 2R so that the
    lateral and top faces only see the bare functional.
    """
    rng = np.random.default_rng(rng_seed)
    d = nl.d
    lead = nl.coefficient(2 * d - 1)
    avals = evaluate_grid(lead, 256, 1)[:, 0] * nl.sign_eps
    a_min = float(avals.min())
    if a_min <= 0.0:
        raise ValueError("saddle geometry needs a sign-definite leading coefficient")

    alpha_plus = min(_alpha_range(dec, "kernel_pos"))
    alpha_minus_vals = _alpha_range(dec, "kernel_neg")
    alpha_minus = min(alpha_minus_vals) if alpha_minus_vals else alpha_plus
    if alpha_minus <= 0:
        raise ValueError("negative family is not negative definite (omega1 >= 2?)")

    policy = TruncationPolicy(cap1=None, cap2=None)
    kappa = 0.0
    for _ in range(16):
        q = _unit_pos(dec, rng)
        kappa = max(kappa, abs(integral(nl.compose_potential(q, 0.0, policy))))
    e_plus = Series2D.cosine((0, 1), 1.0, dec.M1, dec.M2)
    kappa = max(kappa, abs(integral(nl.compose_potential(e_plus, 0.0, policy))))

    rho_star = (alpha_plus / (2.0 * d * kappa)) ** (1.0 / (2.0 * d - 2.0))
    rho = min(rho_star, 0.8 * R)
    level = alpha_plus * rho ** 2 / 2.0 - kappa * rho ** (2 * d)
    if level <= 0:
        raise ValueError("no positive sphere level; shrink rho or the remainder")
    omega = 0.5 * level

    kappa_top = quadratic_form(dec, e_plus)
    kappa_e = integral(nl.compose_potential(e_plus, 0.0, policy))
    r2 = 1.25 * (kappa_top / kappa_e) ** (1.0 / (2.0 * d - 2.0))
    r2 = max(r2, 2.05 * R, 1.5 * rho)

    rgrid = np.linspace(0.0, r2, 257)
    M = float(np.max(kappa_top * rgrid ** 2 - kappa_e * rgrid ** (2 * d)))
    kappa0 = 4.0 * math.pi ** 2 * a_min / (2.0 * d)

    def worst_split(r):
        t = np.linspace(0.0, 1.0, 65)
        return float(np.min(alpha_minus * (t * r) ** 2 / 2.0
                            + kappa0 * (np.sqrt(1.0 - t ** 2) * r) ** (2 * d)))

    r1 = max(rho * 1.5, 1.0)
    while worst_split(r1) < M and r1 < 1e6:
        r1 *= 1.25
    r1 = max(1.25 * r1, 2.05 * R)
    return LinkingGeometry(rho, omega, r1, r2, e_plus, n_sphere, n_boundary)


def verify_saddle_geometry(dec: Decomposition, nl: Nonlinearity,
                           geom: LinkingGeometry, w: SpaceWeights,
                           cert: Certificate, R: float,
                           rng_seed: int = 0) -> GeometryReport:
    """Sampled check of the two linking inequalities.

    The extended functional must stay >= omega on the sphere of radius rho
    in the positive family, and <= omega/2 on the three boundary faces of
    the cylinder (top r = r2, lateral |q0 + q-| = r1, and base r = 0).
    """
    if not geom.rho < R:
        raise ValueError("sphere radius must stay inside the solve ball")
    rng = np.random.default_rng(rng_seed)

    def phi(q1: Series2D) -> float:
        return extended_functional(dec, nl, q1, w, R, cert)

    min_sphere = math.inf
    worst = None
    for i in range(geom.n_sphere):
        q = _unit_pos(dec, rng).scale(geom.rho)
        val = phi(q)
        if val < min_sphere:
            min_sphere = val
            if val < geom.omega_level:
                worst = {"face": "sphere", "index": i, "value": val}

    max_boundary = -math.inf
    samples = []
    nb = max(geom.n_boundary // 3, 4)
    for i in range(nb):  # top face r = r2
        s = rng.uniform(0.0, 1.0)
        samples.append(("top", _unit_neg_mean(dec, rng).scale(s * geom.r1)
                        + geom.e_plus.scale(geom.r2)))
    for i in range(nb):  # lateral face |q0 + q-| = r1
        r = rng.uniform(0.0, geom.r2)
        samples.append(("lateral", _unit_neg_mean(dec, rng).scale(geom.r1)
                        + geom.e_plus.scale(r)))
    for i in range(nb):  # base face r = 0
        s = rng.uniform(0.0, 1.0)
        samples.append(("base", _unit_neg_mean(dec, rng).scale(s * geom.r1)))
    samples.append(("base", Series2D.zero(dec.M1, dec.M2)))

    for i, (face, q) in enumerate(samples):
        try:
            val = phi(q)
        except DivergenceError:
            return GeometryReport(min_sphere, math.inf, geom.omega_level, False,
                                  {"face": face, "index": i,
                                   "value": None, "error": "range solve diverged"})
        if val > max_boundary:
            max_boundary = val
            if val > geom.omega_level / 2.0:
                worst = {"face": face, "index": i, "value": val}

    passes = (min_sphere >= geom.omega_level
              and max_boundary <= geom.omega_level / 2.0)
    return GeometryReport(min_sphere, max_boundary, geom.omega_level, passes,
                          None if passes else worst)


# -- critical point search ----------------------------------------------------


def _q1_basis(dec: Decomposition) -> list:
    modes = [(0, 0)]
    modes += [(0, j) for j in range(1, dec.N + 1)]
    v1, v2 = dec.minus_vector
    modes += [(-k * v1, -k * v2) for k in range(1, dec.N + 1)
              if dec.in_box((-k * v1, -k * v2))]
    return modes


def _q1_to_vec(q: Series2D, modes) -> np.ndarray:
    out = [q.get(modes[0]).real]
    for l in modes[1:]:
        c = q.get(l)
        out.extend((c.real, c.imag))
    return np.array(out)


def _vec_to_q1(x: np.ndarray, modes, dec: Decomposition) -> Series2D:
    coeffs = {}
    if x[0]:
        coeffs[modes[0]] = complex(x[0])
    for i, l in enumerate(modes[1:]):
        c = complex(x[2 * i + 1], x[2 * i + 2])
        if c != 0:
            coeffs[l] = c
    return Series2D(dec.M1, dec.M2, coeffs)


def nontriviality_check(q1: Series2D, dec: Decomposition,
                        tol_mass: float = 1e-6) -> bool:
    """True when the positive-family component carries H^1 mass above tol."""
    return h1_component_norm(project(dec, q1, "kernel_pos"), dec) > tol_mass


def default_seeds(dec: Decomposition, nl: Nonlinearity, rng_seed: int = 0) -> list:
    """Ray seeds t * cos(phi2), a random sphere point, and (for nearly
    constant leading coefficients) the embedded limit oscillator orbit."""
    rng = np.random.default_rng(rng_seed)
    e_plus = Series2D.cosine((0, 1), 1.0, dec.M1, dec.M2)
    seeds = [e_plus.scale(t) for t in np.geomspace(0.4, 2.2, 5)]
    seeds.append(_unit_pos(dec, rng).scale(1.0))
    lead = nl.coefficient(2 * nl.d - 1)
    mean_lead = lead.get((0, 0)).real
    variation = lead.l1_norm() - abs(mean_lead)
    if mean_lead * nl.sign_eps > 0 and variation < 0.5 * abs(mean_lead):
        from .oscillator import limit_orbit
        orbit = limit_orbit(nl.d, nl.sign_eps * mean_lead, dec.setup.eps)
        coeffs = {(0, j): c for (_, j), c in orbit.qbar.coeffs.items()
                  if j <= dec.N}
        seeds.insert(0, Series2D(dec.M1, dec.M2, coeffs))
    return seeds


def find_critical_point(dec: Decomposition, nl: Nonlinearity, w: SpaceWeights,
                        cert: Certificate, seeds: list | None = None,
                        tol: float = 1e-9, ball_radius: float = 2.0,
                        rng_seed: int = 0, max_newton: int = 40,
                        range_tol: float = 1e-13,
                        tol_mass: float = 1e-6) -> SearchResult:
    """Deflated damped Newton on the reduced-functional gradient.

    Seeds are tried in order; the zero solution is deflated away by the
    factor 1 + 1/|q1|_H1^2, and convergence is only accepted at points
    with phi2-only mass above tol_mass (constants are critical for
    degenerate forcing and are not solutions).  The first accepted point
    inside the solve ball wins; the reported minimax estimate is the
    maximum of the extended functional along the ray [0, r2] e_plus (a
    witness for the saddle level, not the infimum over all deformations).
    """
    if seeds is None:
        seeds = default_seeds(dec, nl, rng_seed)
    if not seeds:
        raise SearchError("no seeds supplied")
    modes = _q1_basis(dec)
    traces = []

    def grad_vec(x):
        q1 = _vec_to_q1(x, modes, dec)
        fv = reduced_functional(dec, nl, q1, w, cert, tol=range_tol,
                                ball_radius=ball_radius)
        return _q1_to_vec(fv.gradient, modes), fv

    for si, seed in enumerate(seeds):
        x = _q1_to_vec(seed, modes)
        trace = {"seed": si, "converged": False, "iterations": 0,
                 "grad_norm": None, "q1_norm": None}
        ok = True
        fv = None
        for it in range(1, max_newton + 1):
            try:
                g, fv = grad_vec(x)
            except (DivergenceError, ValueError):
                ok = False
                break
            q1_cur = _vec_to_q1(x, modes, dec)
            q1n = h1_component_norm(q1_cur, dec)
            gn = weighted_norm(fv.gradient, w)
            trace.update(iterations=it, grad_norm=gn, q1_norm=q1n)
            if gn <= tol:
                if nontriviality_check(q1_cur, dec, tol_mass):
                    trace["converged"] = True
                else:
                    trace["note"] = "converged to a trivial point"
                    ok = False
                break
            mu = 1.0 + 1.0 / max(q1n, 1e-12) ** 2
            gd = mu * g
            J = np.empty((len(x), len(x)))
            h = 1e-6 * max(1.0, float(np.max(np.abs(x))))
            for i in range(len(x)):
                xp = x.copy()
                xp[i] += h
                try:
                    gp, _ = grad_vec(xp)
                except (DivergenceError, ValueError):
                    ok = False
                    break
                qn_p = h1_component_norm(_vec_to_q1(xp, modes, dec), dec)
                mup = 1.0 + 1.0 / max(qn_p, 1e-12) ** 2
                J[:, i] = (mup * gp - gd) / h
            if not ok:
                break
            try:
                step = np.linalg.solve(J, -gd)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(J, -gd, rcond=None)[0]
            merit0 = float(gd @ gd)
            lam = 1.0
            for _ in range(25):
                xt = x + lam * step
                if h1_component_norm(_vec_to_q1(xt, modes, dec), dec) > 2.0 * ball_radius:
                    lam *= 0.5
                    continue
                try:
                    gt, _ = grad_vec(xt)
                except (DivergenceError, ValueError):
                    lam *= 0.5
                    continue
                qn_t = h1_component_norm(_vec_to_q1(xt, modes, dec), dec)
                mut = 1.0 + 1.0 / max(qn_t, 1e-12) ** 2
                if float((mut * gt) @ (mut * gt)) < merit0 * (1.0 - 1e-4 * lam):
                    x = xt
                    break
                lam *= 0.5
            else:
                ok = False
                break
        traces.append(trace)
        if ok and trace["converged"]:
            q1 = _vec_to_q1(x, modes, dec)
            if h1_component_norm(q1, dec) <= ball_radius:
                R = h1_component_norm(q1, dec) + 1.0
                try:
                    r2 = default_geometry(dec, nl, w, cert, R, rng_seed).r2
                except ValueError:
                    # no calibrated cylinder (e.g. a leading coefficient
                    # touching zero); keep the ray witness on a default span
                    r2 = 2.0 * R
                e_plus = Series2D.cosine((0, 1), 1.0, dec.M1, dec.M2)
                try:
                    minimax = max(extended_functional(
                        dec, nl, e_plus.scale(t), w, R, cert)
                        for t in np.linspace(0.0, r2, 65))
                except DivergenceError:
                    minimax = fv.value
                return SearchResult(q1, fv.value, trace["grad_norm"], minimax,
                                    R, traces)
            trace["converged"] = False
            trace["note"] = "converged outside the solve ball"
    raise SearchError(f"no seed converged to a nontrivial critical point: {traces}")


def action_identity_gap(dec: Decomposition, nl: Nonlinearity, q1: Series2D,
                        w: SpaceWeights, cert: Certificate,
                        tol: float = 1e-13) -> float:
    """Discrepancy between the action evaluated directly at the assembled
    solution and through the reduced formula const + eps*(Gamma + remainder);
    the constant is the unperturbed action of q1, which vanishes on the
    kernel."""
    sol = solve_range_system(dec, nl, q1, w, cert, tol=tol)
    u = q1 + sol.q2 + sol.p
    setup = dec.setup
    eps, w1 = setup.eps, setup.omega1
    policy = TruncationPolicy(cap1=dec.M1, cap2=dec.M2)

    acc = 0.0
    for l, c in u.coeffs.items():
        mult = 1.0 if l == (0, 0) else 2.0
        quad = (0.5 * w1 * w1 * l[0] * l[0]
                + w1 * (1.0 + eps) * l[0] * l[1]
                + eps * (2.0 + eps) / 2.0 * l[1] * l[1])
        acc += mult * quad * abs(c) ** 2
    direct = 4.0 * math.pi ** 2 * acc - eps * integral(
        nl.compose_potential(u, setup.delta(nl.d), policy))

    fv = reduced_functional(dec, nl, q1, w, cert, tol=tol)
    reduced = eps * fv.value
    return abs(direct - reduced)
