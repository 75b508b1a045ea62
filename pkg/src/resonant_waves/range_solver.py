"""Contraction solves of the range equations.

Case 'a' couples the kernel tail with the range: starting from (0, 0),

    q2 <- -(d_l)^{-1} [ f(phi1, q1+q2+p, delta) restricted to the tail ]
    p  <-  eps (D_l)^{-1} [ f(...) restricted to the range ]

(the second line is the fixed point of the projected equation
-D_l p_l + eps f_l = 0).  Case 'b' solves the single range equation with
prefactor eta^{2(d-1)}.  Plain Picard iteration mirrors the contraction
argument; Anderson mixing is available behind a flag for speed, with the
Picard run as the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, SupportError
from .fourier import (Nonlinearity, Series2D, SpaceWeights, TruncationPolicy,
                      h1_component_norm, weighted_norm)
from .resonance import (Certificate, Decomposition, invert_kernel_tail,
                        invert_on_range, project, validate_pairing,
                        wave_operator)

#: Stopping rule defaults: weighted norm of the update.
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200


@dataclass
class RangeSolution:
    q2: Series2D | None
    p: Series2D
    iterations: int
    contraction_rate: float
    fixed_point_residual: float
    bound_diagnostics: dict
    first_iterate: tuple[Series2D | None, Series2D] | None = None
    update_norms: list = field(default_factory=list)


def _policy_for(dec: Decomposition) -> TruncationPolicy:
    return TruncationPolicy(cap1=dec.M1, cap2=dec.M2)


def _rate_from(updates: list[float], tol: float) -> float:
    ratios = [b / a for a, b in zip(updates, updates[1:]) if a > 10.0 * tol]
    return max(ratios) if ratios else 0.0


def solve_range_system(dec: Decomposition, nl: Nonlinearity, q1: Series2D,
                       w: SpaceWeights, cert: Certificate,
                       tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                       ball_radius: float | None = None,
                       initial: tuple[Series2D, Series2D] | None = None,
                       accelerate: bool = False) -> RangeSolution:
    """Fixed point of the coupled kernel-tail/range system at given q1.

    ``q1`` must be supported on kernel_low, sigma*N <= 1 must hold, and
    (for a nontrivial ball check) the component H^1 norm of q1 must not
    exceed 2*ball_radius.
    """
    for l in q1.coeffs:
        if not dec.in_kernel_low(l):
            raise SupportError(f"q1 mode {l} is not in kernel_low")
    validate_pairing(dec, w)
    if ball_radius is not None:
        h1 = h1_component_norm(q1, dec)
        if h1 > 2.0 * ball_radius:
            raise ValueError(f"|q1|_H1 = {h1:.6g} exceeds 2R = {2 * ball_radius:.6g}")

    setup = dec.setup
    eps = setup.eps
    delta = setup.delta(nl.d)
    op = wave_operator(setup)
    policy = _policy_for(dec)

    q2 = initial[0] if initial else Series2D.zero(dec.M1, dec.M2)
    p = initial[1] if initial else Series2D.zero(dec.M1, dec.M2)
    updates: list[float] = []
    first = None
    history: list = []

    for it in range(1, max_iter + 1):
        u = q1 + q2 + p
        fu = nl.compose(u, delta, policy)
        q2_new = -invert_kernel_tail(dec, project(dec, fu, "kernel_tail"))
        p_new = invert_on_range(dec, op, project(dec, fu, "range"), cert).scale(eps)
        if accelerate and len(history) >= 1:
            q2_new, p_new = _anderson_mix(dec, history, q2, p, q2_new, p_new)
        upd = weighted_norm(q2_new - q2, w) + weighted_norm(p_new - p, w)
        updates.append(upd)
        if first is None:
            first = (q2_new, p_new)
        q2, p = q2_new, p_new
        if upd <= tol:
            break
    else:
        rate = _rate_from(updates, tol)
        if rate >= 1.0:
            raise DivergenceError(
                f"range iteration diverged (rate {rate:.3f}); "
                "reduce |eps|/gamma or enlarge N")
        raise DivergenceError(
            f"range iteration did not reach tol {tol:g} in {max_iter} steps")

    u = q1 + q2 + p
    fu = nl.compose(u, delta, policy)
    res = weighted_norm(-invert_kernel_tail(dec, project(dec, fu, "kernel_tail")) - q2, w)
    res += weighted_norm(
        invert_on_range(dec, op, project(dec, fu, "range"), cert).scale(eps) - p, w)
    diag = {
        "norm_q2_times_N2": weighted_norm(q2, w) * dec.N ** 2,
        "norm_p_times_gamma_over_eps":
            (weighted_norm(p, w) * setup.gamma / abs(eps)) if eps != 0 else 0.0,
    }
    return RangeSolution(q2, p, it, _rate_from(updates, tol), res, diag,
                         first_iterate=first, update_norms=updates)


def _pack(q2: Series2D, p: Series2D, keys):
    return np.array([q2.get(l) if tag == 0 else p.get(l) for tag, l in keys])


def _unpack(vec, keys, dec):
    q2c, pc = {}, {}
    for (tag, l), v in zip(keys, vec):
        if v != 0:
            (q2c if tag == 0 else pc)[l] = complex(v)
    return (Series2D(dec.M1, dec.M2, q2c), Series2D(dec.M1, dec.M2, pc))


def _anderson_mix(dec, history, q2, p, q2_new, p_new, depth=3):
    """Anderson(depth) mixing on the stacked coefficient vector."""
    keys = sorted({(0, l) for l in q2.coeffs} | {(0, l) for l in q2_new.coeffs}
                  | {(1, l) for l in p.coeffs} | {(1, l) for l in p_new.coeffs})
    x = _pack(q2, p, keys)
    g = _pack(q2_new, p_new, keys)
    history.append((keys, x, g))
    del history[:-depth - 1]
    if len(history) < 2:
        return q2_new, p_new
    common = history[-1][0]
    rows = [h for h in history if h[0] == common]
    if len(rows) < 2:
        return q2_new, p_new
    F = np.array([r[2] - r[1] for r in rows])
    dF = np.diff(F, axis=0)
    try:
        theta, *_ = np.linalg.lstsq(dF.T, F[-1], rcond=None)
    except np.linalg.LinAlgError:
        return q2_new, p_new
    G = np.array([r[2] for r in rows])
    mixed = G[-1] - theta @ np.diff(G, axis=0)
    return _unpack(mixed, common, dec)


def solve_range_equation(dec: Decomposition, nl: Nonlinearity, q: Series2D,
                         eta: float, w: SpaceWeights, cert: Certificate,
                         tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                         eta0_guard: float = 0.5) -> RangeSolution:
    """Case 'b' range equation: p = eta^{2(d-1)} (D_l)^{-1} [f(q + p, eta)]_range.

    ``q`` must depend on phi2 only; eta * gamma^{-1/(2(d-1))} must stay
    below the smallness guard.  The prefactor carries the detuning's sign
    (the projected equation is L_eps p + eps*[f]_range = 0, and the
    composition already contains sign(eps)), so the amplitude parameter
    eta stands in for |eps|^{1/(2(d-1))} for either sign.
    """
    if any(l[0] != 0 for l in q.coeffs):
        raise SupportError("q must depend on phi2 only")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    c = 1.0 / (2.0 * (nl.d - 1))
    if eta * dec.setup.gamma ** (-c) > eta0_guard:
        raise ValueError(
            f"eta*gamma^(-{c:g}) = {eta * dec.setup.gamma ** (-c):.4g} "
            f"exceeds the guard {eta0_guard}")

    prefactor = dec.setup.sign_eps() * eta ** (2 * (nl.d - 1))
    op = wave_operator(dec.setup)
    policy = _policy_for(dec)
    p = Series2D.zero(dec.M1, dec.M2)
    updates: list[float] = []
    first = None
    if prefactor == 0.0:
        max_iter = 1
    for it in range(1, max_iter + 1):
        fu = nl.compose(q + p, eta, policy)
        p_new = invert_on_range(dec, op, project(dec, fu, "range"), cert).scale(prefactor)
        upd = weighted_norm(p_new - p, w)
        updates.append(upd)
        if first is None:
            first = (None, p_new)
        p = p_new
        if upd <= tol:
            break
    else:
        raise DivergenceError(
            f"range iteration did not reach tol {tol:g} in {max_iter} steps")

    fu = nl.compose(q + p, eta, policy)
    res = weighted_norm(
        invert_on_range(dec, op, project(dec, fu, "range"), cert).scale(prefactor) - p, w)
    diag = {
        "norm_p_times_gamma_over_eta_power":
            (weighted_norm(p, w) * dec.setup.gamma / abs(prefactor))
            if prefactor else 0.0,
    }
    return RangeSolution(None, p, it, _rate_from(updates, tol), res, diag,
                         first_iterate=first, update_norms=updates)


def translation_equivariance_gap(dec: Decomposition, nl: Nonlinearity,
                                 q: Series2D, eta: float, theta: float,
                                 w: SpaceWeights, cert: Certificate,
                                 tol: float = DEFAULT_TOL) -> dict:
    """Check p(eta, q translated) == p(eta, q) translated, in weighted norm."""
    sol = solve_range_equation(dec, nl, q, eta, w, cert, tol=tol)
    sol_theta = solve_range_equation(dec, nl, q.translate_phi2(theta), eta, w,
                                     cert, tol=tol)
    gap = weighted_norm(sol_theta.p - sol.p.translate_phi2(theta), w)
    return {"gap": gap, "norm_p": weighted_norm(sol.p, w), "theta": theta}


def sensitivity(dec: Decomposition, nl: Nonlinearity, q1: Series2D,
                direction: Series2D, step: float, w: SpaceWeights,
                cert: Certificate, tol: float = DEFAULT_TOL) -> dict:
    """Central-difference sensitivity of the fixed point along a kernel_low
    direction, with the dimensionless ratios against |h|_H1/N^2 and
    |h|_H1 |eps|/gamma."""
    sol_plus = solve_range_system(dec, nl, q1 + direction.scale(step), w, cert, tol=tol)
    sol_minus = solve_range_system(dec, nl, q1 - direction.scale(step), w, cert, tol=tol)
    dq2 = weighted_norm(sol_plus.q2 - sol_minus.q2, w) / (2.0 * step)
    dp = weighted_norm(sol_plus.p - sol_minus.p, w) / (2.0 * step)
    h1 = h1_component_norm(direction, dec)
    eps, gamma = dec.setup.eps, dec.setup.gamma
    return {
        "dq2norm": dq2,
        "dpnorm": dp,
        "ratio_q2": dq2 / (h1 / dec.N ** 2) if h1 > 0 else 0.0,
        "ratio_p": dp / (h1 * abs(eps) / gamma) if h1 > 0 and eps != 0 else 0.0,
    }


def assemble(q1: Series2D, sol: RangeSolution) -> Series2D:
    """q1 + q2 + p (the kernel-low datum plus the solved components)."""
    u = q1 + sol.p
    if sol.q2 is not None:
        u = u + sol.q2
    return u
