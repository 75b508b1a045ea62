"""Truncated real Fourier series on the two-torus.

A function u(phi1, phi2) = sum_l u_l e^{i l.phi} is stored through the
coefficients of its canonical spectral half (l2 > 0, or l2 == 0 and
l1 >= 0); the opposite half is implicitly the complex conjugate, so every
``Series2D`` represents a real-valued function by construction.

The module provides the weighted l^1 norms (exponential weight in l2,
algebraic weight in l1) under which products of series satisfy
|uv| <= 2^s |u| |v|, exact Cauchy convolution with truncation accounting,
spectral calculus, and analytic composition with a power-series
nonlinearity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import RadiusError, SupportError

Index = tuple[int, int]

#: Relative drop threshold for pruning coefficients after an operation.
DROP_REL = 1e-16


def _is_canonical(l: Index) -> bool:
    return l[1] > 0 or (l[1] == 0 and l[0] >= 0)


@dataclass(frozen=True)
class SpaceWeights:
    """Weights of the sequence norm sum |u_l| e^{sigma |l2|} [l1]^s."""

    sigma: float
    s: float

    def __post_init__(self):
        if self.sigma < 0 or self.s < 0:
            raise ValueError("weights must be nonnegative")

    def weight(self, l: Index) -> float:
        return math.exp(self.sigma * abs(l[1])) * float(max(abs(l[0]), 1)) ** self.s


@dataclass(frozen=True)
class TruncationPolicy:
    """Hard caps on the mode box kept after a convolution.

    ``None`` caps keep the full Minkowski-sum box (exact product).  Mass
    discarded by the caps or by the relative drop threshold is accumulated
    into the result's ``tail`` diagnostic.
    """

    cap1: int | None = None
    cap2: int | None = None
    drop_rel: float = DROP_REL


EXACT = TruncationPolicy()


class Series2D:
    """Sparse truncated Fourier series with the reality invariant built in."""

    __slots__ = ("M1", "M2", "coeffs", "tail")

    def __init__(self, M1: int, M2: int, coeffs=None, tail: float = 0.0):
        if M1 < 0 or M2 < 0:
            raise ValueError("mode box half-widths must be nonnegative")
        self.M1 = int(M1)
        self.M2 = int(M2)
        self.tail = float(tail)
        canon: dict[Index, complex] = {}
        if coeffs:
            plus: dict[Index, complex] = {}
            minus: dict[Index, complex] = {}
            for l, c in dict(coeffs).items():
                l = (int(l[0]), int(l[1]))
                if abs(l[0]) > self.M1 or abs(l[1]) > self.M2:
                    raise ValueError(f"index {l} outside the ({M1},{M2}) box")
                if _is_canonical(l):
                    plus[l] = plus.get(l, 0.0) + complex(c)
                else:
                    k = (-l[0], -l[1])
                    minus[k] = minus.get(k, 0.0) + complex(c).conjugate()
            for l in plus.keys() | minus.keys():
                if l in plus and l in minus:
                    c = 0.5 * (plus[l] + minus[l])
                elif l in plus:
                    c = plus[l]
                else:
                    c = minus[l]
                if l == (0, 0):
                    c = complex(c.real, 0.0)
                if c != 0:
                    canon[l] = c
        self.coeffs = canon

    @classmethod
    def _raw(cls, M1, M2, canon, tail=0.0):
        out = cls.__new__(cls)
        out.M1 = int(M1)
        out.M2 = int(M2)
        out.coeffs = canon
        out.tail = float(tail)
        return out

    @classmethod
    def zero(cls, M1: int = 0, M2: int = 0) -> "Series2D":
        return cls(M1, M2)

    @classmethod
    def constant(cls, value: float, M1: int = 0, M2: int = 0) -> "Series2D":
        return cls(M1, M2, {(0, 0): complex(value)} if value else {})

    @classmethod
    def cosine(cls, l: Index, amplitude: float = 1.0, M1=None, M2=None) -> "Series2D":
        """amplitude * cos(l . phi) as a series."""
        M1 = abs(l[0]) if M1 is None else M1
        M2 = abs(l[1]) if M2 is None else M2
        if l == (0, 0):
            return cls.constant(amplitude, M1, M2)
        return cls(M1, M2, {l: amplitude / 2.0})

    @classmethod
    def sine(cls, l: Index, amplitude: float = 1.0, M1=None, M2=None) -> "Series2D":
        """amplitude * sin(l . phi) as a series."""
        M1 = abs(l[0]) if M1 is None else M1
        M2 = abs(l[1]) if M2 is None else M2
        if l == (0, 0):
            return cls.zero(M1, M2)
        return cls(M1, M2, {l: amplitude / 2j})

    # -- access ---------------------------------------------------------

    def get(self, l: Index) -> complex:
        l = (int(l[0]), int(l[1]))
        if _is_canonical(l):
            return self.coeffs.get(l, 0.0 + 0.0j)
        return self.coeffs.get((-l[0], -l[1]), 0.0 + 0.0j).conjugate()

    def items_full(self):
        """Iterate (l, u_l) over the full two-sided support."""
        for l, c in self.coeffs.items():
            yield l, c
            if l != (0, 0):
                yield (-l[0], -l[1]), c.conjugate()

    def support_extent(self) -> tuple[int, int]:
        a1 = max((abs(l[0]) for l in self.coeffs), default=0)
        a2 = max((abs(l[1]) for l in self.coeffs), default=0)
        return a1, a2

    def l1_norm(self) -> float:
        return sum(abs(c) * (1 if l == (0, 0) else 2) for l, c in self.coeffs.items())

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- linear algebra ---------------------------------------------------

    def _merged(self, other: "Series2D", sign: float) -> "Series2D":
        canon = dict(self.coeffs)
        for l, c in other.coeffs.items():
            v = canon.get(l, 0.0 + 0.0j) + sign * c
            if v == 0:
                canon.pop(l, None)
            else:
                canon[l] = v
        return Series2D._raw(max(self.M1, other.M1), max(self.M2, other.M2),
                             canon, self.tail + other.tail)

    def __add__(self, other: "Series2D") -> "Series2D":
        return self._merged(other, 1.0)

    def __sub__(self, other: "Series2D") -> "Series2D":
        return self._merged(other, -1.0)

    def scale(self, factor: float) -> "Series2D":
        """Multiply by a real scalar (reality-preserving)."""
        f = float(factor)
        if f == 0.0:
            return Series2D._raw(self.M1, self.M2, {}, self.tail)
        return Series2D._raw(self.M1, self.M2,
                             {l: f * c for l, c in self.coeffs.items()}, self.tail)

    def __neg__(self) -> "Series2D":
        return self.scale(-1.0)

    def map_symbol(self, rule) -> "Series2D":
        """Apply a diagonal Fourier multiplier; rule(l) must be even in l."""
        canon = {}
        for l, c in self.coeffs.items():
            v = rule(l) * c
            if v != 0:
                canon[l] = v
        return Series2D._raw(self.M1, self.M2, canon, self.tail)

    def filtered(self, keep) -> "Series2D":
        return Series2D._raw(self.M1, self.M2,
                             {l: c for l, c in self.coeffs.items() if keep(l)},
                             self.tail)

    def translate_phi2(self, theta: float) -> "Series2D":
        """The translate u(phi1, phi2 - theta)."""
        canon = {l: c * complex(math.cos(l[1] * theta), -math.sin(l[1] * theta))
                 for l, c in self.coeffs.items()}
        if (0, 0) in canon:
            canon[(0, 0)] = complex(canon[(0, 0)].real, 0.0)
        return Series2D._raw(self.M1, self.M2, canon, self.tail)

    def restricted(self, M1: int, M2: int) -> "Series2D":
        """Copy clipped to a (possibly smaller) box; discarded l^1 mass is
        added to the tail diagnostic."""
        canon, lost = {}, 0.0
        for l, c in self.coeffs.items():
            if abs(l[0]) <= M1 and abs(l[1]) <= M2:
                canon[l] = c
            else:
                lost += abs(c) * (1 if l == (0, 0) else 2)
        return Series2D._raw(M1, M2, canon, self.tail + lost)

    def pruned(self, drop_rel: float = DROP_REL) -> "Series2D":
        thr = drop_rel * self.l1_norm()
        canon, lost = {}, 0.0
        for l, c in self.coeffs.items():
            if abs(c) < thr:
                lost += abs(c) * (1 if l == (0, 0) else 2)
            else:
                canon[l] = c
        return Series2D._raw(self.M1, self.M2, canon, self.tail + lost)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        rows = [[l[0], l[1], c.real, c.imag]
                for l, c in sorted(self.coeffs.items(), key=lambda t: (t[0][1], t[0][0]))]
        return {"M1": self.M1, "M2": self.M2, "coeffs": rows}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Series2D":
        coeffs = {(int(r[0]), int(r[1])): complex(r[2], r[3]) for r in obj["coeffs"]}
        return cls(obj["M1"], obj["M2"], coeffs)

    def __repr__(self):
        return f"Series2D(M1={self.M1}, M2={self.M2}, nnz={len(self.coeffs)}, tail={self.tail:.3e})"


# -- norms and functionals ------------------------------------------------


def weighted_norm(u: Series2D, w: SpaceWeights) -> float:
    """The weighted l^1 norm sum |u_l| e^{sigma|l2|} [l1]^s."""
    total = 0.0
    for l, c in u.coeffs.items():
        total += abs(c) * w.weight(l) * (1 if l == (0, 0) else 2)
    return total


def integral(u: Series2D) -> float:
    """Integral over the full torus [0,2pi]^2."""
    return 4.0 * math.pi ** 2 * u.get((0, 0)).real


def mean(u: Series2D) -> float:
    return u.get((0, 0)).real


def inner(u: Series2D, v: Series2D) -> float:
    """L^2 pairing: integral of u*v over the torus."""
    small, big = (u, v) if len(u.coeffs) <= len(v.coeffs) else (v, u)
    acc = 0.0
    for l, c in small.coeffs.items():
        d = big.coeffs.get(l)
        if d is None:
            continue
        acc += c.real * d.real if l == (0, 0) else 2.0 * (c * d.conjugate()).real
    return 4.0 * math.pi ** 2 * acc


def h1_component_norm(q: Series2D, dec) -> float:
    """Component H^1 norm of a kernel-supported series.

    Each conjugate mode pair {l, -l} with coefficient c contributes
    2|c|^2 (1 + j^2), where j is the one-dimensional index of the kernel
    family the mode belongs to; the mean contributes its square.  Raises
    ``SupportError`` when q has modes outside the kernel of ``dec``.
    """
    total = 0.0
    for l, c in q.coeffs.items():
        if dec.classify(l) == "range":
            raise SupportError(f"mode {l} lies in the range subspace")
        if l == (0, 0):
            total += c.real ** 2
        else:
            j = dec.component_index(l)
            total += 2.0 * abs(c) ** 2 * (1.0 + j * j)
    return math.sqrt(total)


# -- products -------------------------------------------------------------


def _to_dense(u: Series2D) -> tuple[np.ndarray, int, int]:
    a1, a2 = u.support_extent()
    A = np.zeros((2 * a1 + 1, 2 * a2 + 1), dtype=complex)
    for l, c in u.coeffs.items():
        A[l[0] + a1, l[1] + a2] = c
        if l != (0, 0):
            A[a1 - l[0], a2 - l[1]] = c.conjugate()
    return A, a1, a2


def multiply(u: Series2D, v: Series2D, policy: TruncationPolicy = EXACT) -> Series2D:
    """Cauchy product (uv)_j = sum_k u_{j-k} v_k.

    The convolution is computed exactly on the Minkowski-sum box, then
    truncated to the policy caps; discarded l^1 mass is added to the tail
    diagnostic and coefficients below the relative drop threshold are
    pruned.
    """
    if u.is_zero() or v.is_zero():
        return Series2D._raw(0, 0, {}, u.tail + v.tail)
    A, a1, a2 = _to_dense(u)
    B, b1, b2 = _to_dense(v)
    C = signal.convolve(A, B, method="auto")
    c1, c2 = a1 + b1, a2 + b2
    k1 = c1 if policy.cap1 is None else min(c1, policy.cap1)
    k2 = c2 if policy.cap2 is None else min(c2, policy.cap2)
    absC = np.abs(C)
    total_mass = float(absC.sum())
    W = C[c1 - k1:c1 + k1 + 1, c2 - k2:c2 + k2 + 1]
    kept_mass = float(absC[c1 - k1:c1 + k1 + 1, c2 - k2:c2 + k2 + 1].sum())
    discarded = total_mass - kept_mass

    # hermitize: exact reality regardless of convolution roundoff
    H = 0.5 * (W + np.conj(W[::-1, ::-1]))
    thr = policy.drop_rel * kept_mass
    canon: dict[Index, complex] = {}
    pruned_mass = 0.0
    idx = np.argwhere(np.abs(H) > 0.0)
    for i1, i2 in idx:
        l = (int(i1) - k1, int(i2) - k2)
        if not _is_canonical(l):
            continue
        c = complex(H[i1, i2])
        if l == (0, 0):
            c = complex(c.real, 0.0)
        if abs(c) < thr:
            pruned_mass += abs(c) * (1 if l == (0, 0) else 2)
        elif c != 0:
            canon[l] = c
    return Series2D._raw(k1, k2, canon, u.tail + v.tail + discarded + pruned_mass)


def power(u: Series2D, k: int, policy: TruncationPolicy = EXACT) -> Series2D:
    """u^k through binary exponentiation over ``multiply``."""
    if k < 0:
        raise ValueError("negative powers are not defined for series")
    if k == 0:
        return Series2D.constant(1.0)
    result = None
    base = u
    n = k
    while n:
        if n & 1:
            result = base if result is None else multiply(result, base, policy)
        n >>= 1
        if n:
            base = multiply(base, base, policy)
    return result


def derivative(u: Series2D, axis: int) -> Series2D:
    """Partial derivative along phi_axis (axis in {1, 2})."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    pos = axis - 1
    canon = {}
    for l, c in u.coeffs.items():
        if l[pos] != 0:
            canon[l] = 1j * l[pos] * c
    return Series2D._raw(u.M1, u.M2, canon, u.tail)


def evaluate(u: Series2D, phi1: float, phi2: float) -> float:
    """Point value of the series (real by construction)."""
    total = u.get((0, 0)).real
    for l, c in u.coeffs.items():
        if l == (0, 0):
            continue
        ang = l[0] * phi1 + l[1] * phi2
        total += 2.0 * (c.real * math.cos(ang) - c.imag * math.sin(ang))
    return total


def evaluate_grid(u: Series2D, n1: int, n2: int) -> np.ndarray:
    """Values on the equispaced (n1 x n2) grid, vectorized."""
    p1 = 2.0 * np.pi * np.arange(n1) / n1
    p2 = 2.0 * np.pi * np.arange(n2) / n2
    out = np.zeros((n1, n2))
    for l, c in u.coeffs.items():
        phase = np.add.outer(l[0] * p1, l[1] * p2)
        if l == (0, 0):
            out += c.real
        else:
            out += 2.0 * (c.real * np.cos(phase) - c.imag * np.sin(phase))
    return out


# -- nonlinear composition -------------------------------------------------


@dataclass
class Nonlinearity:
    """Analytic forcing nonlinearity sum_k a_k(phi1) u^k, k >= 2d-1.

    ``coeffs`` maps the power k to the coefficient series a_k (supported on
    the l2 = 0 line).  ``sign_eps`` carries the orientation of the detuning
    (+1 when the response frequency exceeds 1).  ``radius`` bounds the
    domain of the rescaled composition.
    """

    d: int
    coeffs: dict[int, Series2D]
    radius: float
    sign_eps: int = 1
    allow_zero: bool = False

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("leading power 2d-1 requires d >= 2")
        if self.radius <= 0:
            raise ValueError("analyticity radius must be positive")
        if self.sign_eps not in (-1, 1):
            raise ValueError("sign_eps must be +1 or -1")
        lead = 2 * self.d - 1
        if not self.allow_zero and (lead not in self.coeffs
                                    or self.coeffs[lead].is_zero()):
            raise ValueError(f"leading coefficient a_{lead} must be present and nonzero")
        for k, a in self.coeffs.items():
            if k < lead:
                raise ValueError(f"coefficient power {k} below the leading power {lead}")
            if any(l[1] != 0 for l in a.coeffs):
                raise SupportError(f"a_{k} must depend on phi1 only")

    @property
    def k_max(self) -> int:
        return max(self.coeffs)

    def coefficient(self, k: int) -> Series2D:
        return self.coeffs.get(k, Series2D.zero())

    def nonconstant_in_phi1(self) -> bool:
        return any(any(l != (0, 0) for l in a.coeffs) for a in self.coeffs.values())

    def h1_budget(self) -> float:
        """Finite surrogate of the coefficient summability condition:
        sum_k |a_k|_{H^1(T)} r^k over the stored list."""
        total = 0.0
        for k, a in self.coeffs.items():
            h1 = math.sqrt(sum((1.0 + l[0] ** 2) * abs(c) ** 2 * (1 if l == (0, 0) else 2)
                               for l, c in a.coeffs.items()))
            total += h1 * self.radius ** k
        return total

    def _guard(self, u: Series2D, delta: float):
        nrm = weighted_norm(u, SpaceWeights(0.0, 0.0))
        if nrm * delta >= self.radius:
            raise RadiusError(
                f"analyticity guard violated: |u|_1 * delta = {nrm * delta:.6g} "
                f">= radius {self.radius:.6g}")

    def compose(self, u: Series2D, delta: float,
                policy: TruncationPolicy = EXACT) -> Series2D:
        """Rescaled composition sign_eps * sum_k a_k delta^{k-(2d-1)} u^k."""
        self._guard(u, delta)
        lead = 2 * self.d - 1
        du = u.scale(delta)
        g = self.coefficient(self.k_max)
        for k in range(self.k_max - 1, lead - 1, -1):
            g = multiply(g, du, policy) + self.coefficient(k)
        out = multiply(g, power(u, lead, policy), policy)
        return out.scale(self.sign_eps)

    def compose_potential(self, u: Series2D, delta: float,
                          policy: TruncationPolicy = EXACT) -> Series2D:
        """Primitive in u: sign_eps * sum_k a_k delta^{k-(2d-1)} u^{k+1}/(k+1)."""
        self._guard(u, delta)
        lead = 2 * self.d - 1
        du = u.scale(delta)
        g = self.coefficient(self.k_max).scale(1.0 / (self.k_max + 1))
        for k in range(self.k_max - 1, lead - 1, -1):
            g = multiply(g, du, policy) + self.coefficient(k).scale(1.0 / (k + 1))
        out = multiply(g, power(u, lead + 1, policy), policy)
        return out.scale(self.sign_eps)

    def compose_physical(self, u: Series2D,
                         policy: TruncationPolicy = EXACT) -> Series2D:
        """Unrescaled forcing term sum_k a_k u^k (no sign, no delta powers)."""
        self._guard(u, 1.0)
        lead = 2 * self.d - 1
        g = self.coefficient(self.k_max)
        for k in range(self.k_max - 1, lead - 1, -1):
            g = multiply(g, u, policy) + self.coefficient(k)
        return multiply(g, power(u, lead, policy), policy)


def cosine_table_series(table, M1: int) -> Series2D:
    """Build a phi1-only coefficient series from (harmonic, cos amp, sin amp) rows."""
    coeffs: dict[Index, complex] = {}
    for j, ca, sa in table:
        j = int(j)
        if j == 0:
            coeffs[(0, 0)] = coeffs.get((0, 0), 0.0) + complex(ca)
        else:
            coeffs[(j, 0)] = coeffs.get((j, 0), 0.0) + complex(ca / 2.0, -sa / 2.0)
    return Series2D(M1, 0, coeffs)
