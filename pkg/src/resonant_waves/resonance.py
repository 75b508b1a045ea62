"""Frequency setups, Diophantine sieves, and the resonance decomposition.

The linearized wave operator in the rotated torus variables is diagonal
with the quadratic eigenvalue rule

    D_l = (omega1 l1 + eps l2) (omega1 l1 + (2 + eps) l2).

Its kernel at eps = 0 (the "kernel" index set) carries the bifurcation
equation; on the complementary "range" set the rule is bounded away from
zero for sieved parameters, which is what the bound certificates verify.
As a differential operator the symbol on e^{i l.phi} is -D_l; the
``rule``/``symbol`` distinction below keeps both views explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import SupportError, UncertifiedError
from .fourier import Series2D, SpaceWeights, weighted_norm

#: Default detuning window and gap constant (both configurable).
DEFAULT_EPS0 = 0.1
DEFAULT_GAMMA = 1e-3

#: Largest convergent denominator probed by the irrationality surrogate.
RATIONALITY_QMAX = 10 ** 6
RATIONALITY_TOL = 1e-15


@dataclass(frozen=True)
class FrequencySetup:
    """Forcing/response frequency pair.

    case "a": omega1 = n/m rational (n, m coprime positive integers);
    case "b": omega1 an irrational in (1, 2).  The response frequency is
    omega2 = 1 + eps.
    """

    case: str
    eps: float
    gamma: float = DEFAULT_GAMMA
    n: int = 1
    m: int = 1
    omega1_value: float = 0.0
    eps0: float = DEFAULT_EPS0

    def __post_init__(self):
        if self.case not in ("a", "b"):
            raise ValueError("case must be 'a' or 'b'")
        if not 0.0 < self.gamma < 1.0 / 6.0:
            raise ValueError("gamma must lie in (0, 1/6)")
        if abs(self.eps) >= self.eps0:
            raise ValueError(f"|eps| = {abs(self.eps)} must be below eps0 = {self.eps0}")
        if self.case == "a":
            if self.n < 1 or self.m < 1:
                raise ValueError("n and m must be positive integers")
            if math.gcd(self.n, self.m) != 1:
                raise ValueError("n and m must be coprime")
        else:
            if not 1.0 < self.omega1_value < 2.0:
                raise ValueError("case 'b' requires omega1 in (1, 2)")

    @property
    def omega1(self) -> float:
        return self.n / self.m if self.case == "a" else self.omega1_value

    @property
    def omega2(self) -> float:
        return 1.0 + self.eps

    def delta(self, d: int) -> float:
        """Amplitude scale |eps|^{1/(2(d-1))} for leading power 2d-1."""
        if d < 2:
            raise ValueError("d >= 2 required")
        return abs(self.eps) ** (1.0 / (2.0 * (d - 1)))

    def sign_eps(self) -> int:
        return -1 if self.eps < 0 else 1


# -- Diophantine sieves -----------------------------------------------------


@dataclass(frozen=True)
class SieveResult:
    accepted: bool
    witness: tuple[int, int] | None = None
    condition: str | None = None

    def __bool__(self):
        return self.accepted


def rational_convergent(x: float, qmax: int = RATIONALITY_QMAX,
                        tol: float = RATIONALITY_TOL):
    """First continued-fraction convergent p/q, q <= qmax, within tol of x.

    Returns (p, q) or None.  Doubles are rational, so this is the working
    surrogate for 'x is irrational up to denominator qmax'.
    """
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(math.floor(x)), 1
    frac = x - math.floor(x)
    for _ in range(64):
        if abs(x - p_cur / q_cur) <= tol:
            return p_cur, q_cur
        if frac == 0.0:
            return None
        a = math.floor(1.0 / frac)
        frac = 1.0 / frac - a
        p_cur, p_prev = int(a) * p_cur + p_prev, p_cur
        q_cur, q_prev = int(a) * q_cur + q_prev, q_cur
        if q_cur > qmax:
            return None
    return None


def accepts_eps(eps: float, gamma: float, lmax: int) -> SieveResult:
    """Case 'a' sieve: |l1 + eps l2| > gamma / |l2| for nonzero l1, l2.

    Only the truncation actually inverted is checked: |l2| <= lmax, and for
    each l2 only the integers l1 within distance one of -eps*l2 can fail
    (gamma < 1/6 < 1), which are checked exhaustively.  On rejection the
    witness has minimal |l2|.
    """
    if lmax < 1:
        raise ValueError("lmax >= 1 required")
    for l2 in range(1, lmax + 1):
        target = -eps * l2
        bound = gamma / l2
        lo, hi = math.floor(target) - 1, math.ceil(target) + 1
        for l1 in range(lo, hi + 1):
            if l1 == 0 or abs(l1) > 2 * lmax + 1:
                continue
            if abs(l1 + eps * l2) <= bound:
                return SieveResult(False, (l1, l2), "detuning gap")
    return SieveResult(True)


def accepts_pair(eps: float, omega1: float, gamma: float, lmax: int,
                 qmax: int = RATIONALITY_QMAX) -> SieveResult:
    """Case 'b' sieve on (eps, omega1).

    Requires the two first-order gaps
        |omega1 l1 + eps l2| > gamma/(|l1|+|l2|),
        |omega1 l1 + (2+eps) l2| > gamma/(|l1|+|l2|)
    for all nonzero l1, l2 with |l1|, |l2| <= lmax, plus the rationality
    surrogates for omega1 and omega1/(1+eps).
    """
    if lmax < 1:
        raise ValueError("lmax >= 1 required")
    hit = rational_convergent(omega1, qmax)
    if hit is not None:
        return SieveResult(False, hit, "omega1 rational")
    hit = rational_convergent(omega1 / (1.0 + eps), qmax)
    if hit is not None:
        return SieveResult(False, hit, "omega1/omega2 rational")
    ls = np.arange(-lmax, lmax + 1)
    L1, L2 = np.meshgrid(ls, ls, indexing="ij")
    mask = (L1 != 0) & (L2 != 0)
    denom = gamma / (np.abs(L1) + np.abs(L2) + (~mask))
    first = np.abs(omega1 * L1 + eps * L2)
    second = np.abs(omega1 * L1 + (2.0 + eps) * L2)
    bad1 = mask & (first <= denom)
    bad2 = mask & (second <= denom)
    if bad1.any():
        i, j = np.argwhere(bad1)[0]
        return SieveResult(False, (int(L1[i, j]), int(L2[i, j])), "first gap")
    if bad2.any():
        i, j = np.argwhere(bad2)[0]
        return SieveResult(False, (int(L1[i, j]), int(L2[i, j])), "second gap")
    return SieveResult(True)


@dataclass(frozen=True)
class SievePoint:
    case: str
    eps: float
    omega1: float
    gamma: float
    lmax: int
    accepted: bool
    witness: tuple[int, int] | None


def sieve_table(case: str, interval: tuple[float, float], gamma: float,
                lmax: int, count: int, omega1: float | None = None) -> list[SievePoint]:
    """Equispaced midpoint candidates over ``interval`` with sieve verdicts."""
    if count < 1:
        raise ValueError("count >= 1 required")
    lo, hi = interval
    if not hi > lo:
        raise ValueError("interval must be increasing")
    if case == "b" and omega1 is None:
        raise ValueError("case 'b' sieving needs omega1")
    rows = []
    for i in range(count):
        eps = lo + (i + 0.5) * (hi - lo) / count
        if eps == 0.0:
            continue
        if case == "a":
            res = accepts_eps(eps, gamma, lmax)
            w1 = 0.0
        else:
            res = accepts_pair(eps, omega1, gamma, lmax)
            w1 = omega1
        rows.append(SievePoint(case, eps, w1, gamma, lmax, res.accepted, res.witness))
    return rows


def sieve_interval(case: str, interval: tuple[float, float], gamma: float,
                   lmax: int, count: int, omega1: float | None = None) -> list[SievePoint]:
    """The admissible points of :func:`sieve_table` (both detuning signs kept)."""
    return [p for p in sieve_table(case, interval, gamma, lmax, count, omega1)
            if p.accepted]


# -- decomposition ----------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Resonance classification of the (2 M1 + 1) x (2 M2 + 1) mode box.

    Kernel families:
      mean        -- the constant mode (0, 0);
      kernel_pos  -- l1 = 0, l != 0 (phi2-only waves; positive-definite
                     part of the reduced quadratic form);
      kernel_neg  -- the lattice line n l1 + 2 m l2 = 0, l != 0 (case 'a'
                     counter-propagating waves; negative-definite part).
    Everything else is "range".  The Galerkin split keeps kernel modes of
    one-dimensional index <= N in kernel_low and the rest in kernel_tail.
    """

    setup: FrequencySetup
    M1: int
    M2: int
    N: int

    def __post_init__(self):
        if self.M1 < 0 or self.M2 < 0 or self.N < 1:
            raise ValueError("box sizes must be nonnegative and N >= 1")

    @cached_property
    def minus_vector(self) -> tuple[int, int]:
        """Primitive generator of the kernel_neg lattice line."""
        n, m = self.setup.n, self.setup.m
        if n % 2 == 1:
            return (2 * m, -n)
        return (m, -(n // 2))

    def classify(self, l) -> str:
        l1, l2 = int(l[0]), int(l[1])
        if l1 == 0 and l2 == 0:
            return "mean"
        if l1 == 0:
            return "kernel_pos"
        if self.setup.case == "a" and self.setup.n * l1 + 2 * self.setup.m * l2 == 0:
            return "kernel_neg"
        return "range"

    def component_index(self, l) -> int:
        """One-dimensional index of a kernel mode (j for (0, j); k for k*v)."""
        fam = self.classify(l)
        if fam == "mean":
            return 0
        if fam == "kernel_pos":
            return int(l[1])
        if fam == "kernel_neg":
            return int(l[0]) // self.minus_vector[0]
        raise SupportError(f"mode {tuple(l)} lies in the range subspace")

    def in_box(self, l) -> bool:
        return abs(l[0]) <= self.M1 and abs(l[1]) <= self.M2

    def in_kernel_low(self, l) -> bool:
        return self.classify(l) != "range" and abs(self.component_index(l)) <= self.N

    def in_kernel_tail(self, l) -> bool:
        return self.classify(l) != "range" and abs(self.component_index(l)) > self.N

    def target_predicate(self, target: str):
        preds = {
            "kernel": lambda l: self.classify(l) != "range",
            "range": lambda l: self.classify(l) == "range",
            "kernel_pos": lambda l: self.classify(l) == "kernel_pos",
            "mean": lambda l: self.classify(l) == "mean",
            "kernel_neg": lambda l: self.classify(l) == "kernel_neg",
            "kernel_low": self.in_kernel_low,
            "kernel_tail": self.in_kernel_tail,
        }
        if target not in preds:
            raise ValueError(f"unknown projection target {target!r}")
        return preds[target]

    def kernel_indices(self) -> list[tuple[int, int]]:
        """In-box kernel modes: exactly where the wave rule vanishes at eps = 0."""
        out = [(0, 0)]
        out += [(0, l2) for l2 in range(-self.M2, self.M2 + 1) if l2 != 0]
        if self.setup.case == "a":
            v1, v2 = self.minus_vector
            kmax = min(self.M1 // v1, self.M2 // abs(v2)) if v1 else 0
            out += [(k * v1, k * v2) for k in range(-kmax, kmax + 1) if k != 0]
        return [l for l in out if self.in_box(l)]

    def grid(self):
        l1 = np.arange(-self.M1, self.M1 + 1)
        l2 = np.arange(-self.M2, self.M2 + 1)
        return np.meshgrid(l1, l2, indexing="ij")


def project(dec: Decomposition, u: Series2D, target: str) -> Series2D:
    """Coefficient restriction to a decomposition index set."""
    return u.filtered(dec.target_predicate(target))


# -- diagonal operators -----------------------------------------------------


@dataclass(frozen=True)
class DiagonalOperator:
    """Fourier-diagonal operator given by a quadratic index rule.

    kind "wave":   rule D_l = (w1 l1 + eps l2)(w1 l1 + (2+eps) l2); the
                   differential operator acts by -D_l on e^{i l.phi}.
    kind "kernel": rule d_l = -(2+eps) l2^2 - 2 w1 l1 l2, the true symbol
                   of the order-eps part acting within the kernel.
    """

    kind: str
    setup: FrequencySetup

    def __post_init__(self):
        if self.kind not in ("wave", "kernel"):
            raise ValueError("kind must be 'wave' or 'kernel'")

    def rule(self, l) -> float:
        l1, l2 = int(l[0]), int(l[1])
        eps = self.setup.eps
        if self.kind == "wave":
            if self.setup.case == "a":
                n, m = self.setup.n, self.setup.m
                return ((n * l1 + eps * m * l2)
                        * (n * l1 + (2.0 + eps) * m * l2)) / (m * m)
            w1 = self.setup.omega1
            return (w1 * l1 + eps * l2) * (w1 * l1 + (2.0 + eps) * l2)
        return -(2.0 + eps) * l2 * l2 - 2.0 * self.setup.omega1 * l1 * l2

    def symbol(self, l) -> float:
        """Action on e^{i l.phi} as a differential operator."""
        return -self.rule(l) if self.kind == "wave" else self.rule(l)

    def rule_grid(self, dec: Decomposition) -> np.ndarray:
        L1, L2 = dec.grid()
        eps = self.setup.eps
        if self.kind == "wave":
            if self.setup.case == "a":
                n, m = self.setup.n, self.setup.m
                return ((n * L1 + eps * m * L2)
                        * (n * L1 + (2.0 + eps) * m * L2)) / float(m * m)
            w1 = self.setup.omega1
            return (w1 * L1 + eps * L2) * (w1 * L1 + (2.0 + eps) * L2)
        return -(2.0 + eps) * L2 * L2 - 2.0 * self.setup.omega1 * L1 * L2


def wave_operator(setup: FrequencySetup) -> DiagonalOperator:
    return DiagonalOperator("wave", setup)


def kernel_operator(setup: FrequencySetup) -> DiagonalOperator:
    return DiagonalOperator("kernel", setup)


def eigenvalue(op: DiagonalOperator, l) -> float:
    """The operator's eigenvalue rule at index l."""
    return op.rule(l)


def apply_symbol(op: DiagonalOperator, u: Series2D) -> Series2D:
    """Apply the differential operator (true symbol) to a series."""
    return u.map_symbol(op.symbol)


# -- bound certification ----------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    dec: Decomposition
    passes: bool
    min_abs_on_range: float
    threshold: float
    witness: tuple[int, int] | None
    sieve: SieveResult
    tail_min: float
    tail_threshold: float
    tail_ok: bool

    def __bool__(self):
        return self.passes


def certify_bounds(dec: Decomposition, op: DiagonalOperator) -> Certificate:
    """Exhaustive lower bounds for the diagonal inverses on the mode box.

    Verifies min |D_l| > gamma/m^2 (case 'a') or > gamma (case 'b') over
    in-box range modes, re-running the sieve at lmax = max(M1, M2), and
    that |d_l| >= (2 - |eps|) N^2 on the kernel tail.
    """
    if op.kind != "wave":
        raise ValueError("certification applies to the wave operator")
    setup = dec.setup
    lmax = max(dec.M1, dec.M2, 1)
    if setup.case == "a":
        sieve = accepts_eps(setup.eps, setup.gamma, lmax)
        threshold = setup.gamma / setup.m ** 2
    else:
        sieve = accepts_pair(setup.eps, setup.omega1, setup.gamma, lmax)
        threshold = setup.gamma

    L1, L2 = dec.grid()
    D = op.rule_grid(dec)
    if setup.case == "a":
        range_mask = (L1 != 0) & (setup.n * L1 + 2 * setup.m * L2 != 0)
    else:
        range_mask = L1 != 0
    absD = np.where(range_mask, np.abs(D), np.inf)
    flat = int(np.argmin(absD))
    i, j = np.unravel_index(flat, absD.shape)
    min_abs = float(absD[i, j])
    witness = (int(L1[i, j]), int(L2[i, j]))

    kop = kernel_operator(setup)
    dgrid = np.abs(kop.rule_grid(dec))
    tail_mask = np.zeros_like(range_mask)
    for l in dec.kernel_indices():
        if dec.in_kernel_tail(l):
            tail_mask[l[0] + dec.M1, l[1] + dec.M2] = True
    tail_threshold = (2.0 - abs(setup.eps)) * dec.N ** 2
    tail_min = float(np.where(tail_mask, dgrid, np.inf).min()) if tail_mask.any() else math.inf
    tail_ok = tail_min >= tail_threshold

    passes = bool(sieve.accepted and min_abs > threshold and tail_ok)
    return Certificate(dec, passes, min_abs, threshold,
                       None if passes else witness, sieve, tail_min,
                       tail_threshold, tail_ok)


def _require_certificate(dec: Decomposition, cert: Certificate | None):
    if cert is None or not cert.passes:
        raise UncertifiedError("operation requires a passing bound certificate")
    if cert.dec is not dec and cert.dec != dec:
        raise UncertifiedError("certificate was issued for a different decomposition")


def invert_on_range(dec: Decomposition, op: DiagonalOperator, h: Series2D,
                    cert: Certificate) -> Series2D:
    """Divide range-supported coefficients by the wave rule D_l.

    This solves D_l p_l = h_l; the differential operator acts by -D_l, so
    the true inverse of the operator is the negative of this map.
    """
    if op.kind != "wave":
        raise ValueError("invert_on_range applies to the wave operator")
    _require_certificate(dec, cert)
    for l in h.coeffs:
        if dec.classify(l) != "range":
            raise SupportError(f"mode {l} is not in the range subspace")
    out = h.map_symbol(lambda l: 1.0 / op.rule(l))
    w0 = SpaceWeights(0.0, 0.0)
    bound = weighted_norm(h, w0) / cert.threshold
    if weighted_norm(out, w0) > bound * (1.0 + 1e-9):
        raise UncertifiedError("certified inverse bound violated")
    return out


def invert_kernel_tail(dec: Decomposition, h: Series2D) -> Series2D:
    """Divide kernel-tail coefficients by the kernel rule d_l."""
    for l in h.coeffs:
        if not dec.in_kernel_tail(l):
            raise SupportError(f"mode {l} is not in the kernel tail")
    kop = kernel_operator(dec.setup)
    out = h.map_symbol(lambda l: 1.0 / kop.rule(l))
    w0 = SpaceWeights(0.0, 0.0)
    bound = weighted_norm(h, w0) / ((2.0 - abs(dec.setup.eps)) * dec.N ** 2)
    if weighted_norm(out, w0) > bound * (1.0 + 1e-9):
        raise UncertifiedError("kernel tail inverse bound violated")
    return out


def setup_with_eps(setup: FrequencySetup, eps: float) -> FrequencySetup:
    """Copy of a setup with a different detuning."""
    return replace(setup, eps=eps)


def validate_weights_for_case(w: SpaceWeights, case: str,
                              s_coeff: float = 1.0) -> None:
    """Smoothness window for the composition: 0 < s < 1/2 in case 'a',
    0 < s < s_coeff - 1/2 in case 'b'."""
    if case == "a":
        if not 0.0 < w.s < 0.5:
            raise ValueError("case 'a' needs 0 < s < 1/2")
    else:
        if not 0.0 < w.s < s_coeff - 0.5:
            raise ValueError("case 'b' needs 0 < s < s_coeff - 1/2")


def validate_pairing(dec: Decomposition, w: SpaceWeights) -> None:
    """Galerkin/weight compatibility sigma * N <= 1 for case 'a' solves."""
    if dec.setup.case == "a" and w.sigma * dec.N > 1.0 + 1e-12:
        raise ValueError(f"sigma*N = {w.sigma * dec.N:.6g} exceeds 1")
