"""Flat key-value run configuration.

The file format is line-oriented ``key = value`` with ``#`` comments.
Forcing coefficients are given per power as triples
``a<k> = j:cos:sin, j:cos:sin, ...`` (harmonic index, cosine amplitude,
sine amplitude).  Lists are comma-separated.  Every module precondition
is re-validated at load: coprimality, the gamma window, sigma*N <= 1,
and the smoothness window for the case.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ConfigError
from .fourier import Nonlinearity, SpaceWeights, Series2D, cosine_table_series
from .resonance import (Decomposition, FrequencySetup, validate_pairing,
                        validate_weights_for_case)

_COEFF_KEY = re.compile(r"^a(\d+)$")

_DEFAULTS = {
    "case": "b",
    "d": 2,
    "n": 1,
    "m": 1,
    "omega1": 1.6180339887498949,
    "eps": 1e-4,
    "gamma": 1e-3,
    "eps0": 0.1,
    "radius": 10.0,
    "M1": 6,
    "M2": 24,
    "N": 6,
    "sigma": 0.125,
    "s": 0.4,
    "s_coeff": 1.0,
    "lmax": 64,
    "tol_range": 1e-12,
    "tol_newton": 1e-10,
    "max_iter": 200,
    "R": 2.0,
    "seed": 0,
    "eta0_guard": 0.5,
    "tol_mass": 1e-9,
    "verify_residual_max": 1e-7,
    "eps_grid": (),
    "probe_D": 2,
    "probe_a": (),
    "rho_grid": (),
    "probe_eps": (),
    "out_json": "",
    "out_csv": "",
    "orbit_csv": "",
}

_INT_KEYS = {"d", "n", "m", "M1", "M2", "N", "lmax", "max_iter", "seed", "probe_D"}
_FLOAT_KEYS = {"omega1", "eps", "gamma", "eps0", "radius", "sigma", "s",
               "s_coeff", "tol_range", "tol_newton", "R", "eta0_guard",
               "tol_mass", "verify_residual_max"}
_LIST_KEYS = {"eps_grid", "rho_grid", "probe_eps"}
_STR_KEYS = {"case", "out_json", "out_csv", "orbit_csv"}


@dataclass(frozen=True)
class RunConfig:
    case: str = "b"
    d: int = 2
    n: int = 1
    m: int = 1
    omega1: float = _DEFAULTS["omega1"]
    eps: float = 1e-4
    gamma: float = 1e-3
    eps0: float = 0.1
    radius: float = 10.0
    coeff_tables: dict = field(default_factory=dict)
    M1: int = 6
    M2: int = 24
    N: int = 6
    sigma: float = 0.125
    s: float = 0.4
    s_coeff: float = 1.0
    lmax: int = 64
    tol_range: float = 1e-12
    tol_newton: float = 1e-10
    max_iter: int = 200
    R: float = 2.0
    seed: int = 0
    eta0_guard: float = 0.5
    tol_mass: float = 1e-9
    verify_residual_max: float = 1e-7
    eps_grid: tuple = ()
    probe_D: int = 2
    probe_a: tuple = ()
    rho_grid: tuple = ()
    probe_eps: tuple = ()
    out_json: str = ""
    out_csv: str = ""
    orbit_csv: str = ""

    def setup(self) -> FrequencySetup:
        if self.case == "a":
            return FrequencySetup("a", self.eps, self.gamma, n=self.n, m=self.m,
                                  eps0=self.eps0)
        return FrequencySetup("b", self.eps, self.gamma,
                              omega1_value=self.omega1, eps0=self.eps0)

    def weights(self) -> SpaceWeights:
        return SpaceWeights(self.sigma, self.s)

    def decomposition(self) -> Decomposition:
        return Decomposition(self.setup(), self.M1, self.M2, self.N)

    def nonlinearity(self) -> Nonlinearity:
        if not self.coeff_tables:
            raise ConfigError("no forcing coefficients a<k> configured")
        sign = -1 if self.eps < 0 else 1
        coeffs = {k: cosine_table_series(tab, self.M1)
                  for k, tab in self.coeff_tables.items()}
        lead = 2 * self.d - 1
        if lead not in coeffs:
            raise ConfigError(f"leading coefficient a{lead} missing for d={self.d}")
        # a vanishing table is allowed through to the solver so degenerate
        # forcing fails at the search stage rather than at load time
        return Nonlinearity(self.d, coeffs, self.radius, sign,
                            allow_zero=coeffs[lead].is_zero())

    def probe_series(self) -> Series2D:
        if not self.probe_a:
            raise ConfigError("probe needs a coefficient table probe_a")
        return cosine_table_series(self.probe_a, self.M1)

    def validated(self) -> "RunConfig":
        setup = self.setup()           # checks coprimality, gamma, eps window
        dec = self.decomposition()
        w = self.weights()
        validate_weights_for_case(w, self.case, self.s_coeff)
        validate_pairing(dec, w)
        if self.lmax < max(self.M1, self.M2):
            raise ConfigError("lmax must cover the mode box: "
                              f"lmax={self.lmax} < max(M1,M2)")
        if self.d < 2:
            raise ConfigError("d >= 2 required")
        self.nonlinearity()            # checks the leading coefficient
        return self


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _STR_KEYS:
        return raw
    if key in _LIST_KEYS:
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    raise ConfigError(f"unknown configuration key {key!r}")


def _parse_table(raw: str):
    rows = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ConfigError(f"coefficient entry {chunk!r} is not j:cos:sin")
        rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
    return tuple(rows)


def parse_config_text(text: str) -> RunConfig:
    values = {}
    tables = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        mcoeff = _COEFF_KEY.match(key)
        if mcoeff:
            tables[int(mcoeff.group(1))] = _parse_table(raw)
        elif key == "probe_a":
            values["probe_a"] = _parse_table(raw)
        else:
            values[key] = _parse_value(key, raw)
    if values.get("case", _DEFAULTS["case"]) not in ("a", "b"):
        raise ConfigError("case must be 'a' or 'b'")
    return RunConfig(coeff_tables=tables, **values).validated()


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return parse_config_text(text)
