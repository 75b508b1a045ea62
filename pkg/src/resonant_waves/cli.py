"""Command-line front end.

Subcommands: sieve | solve | scan | probe | verify.  Exit codes: 0 on
pass, 1 on usage errors, 2 on sieve/certification failures, 3 on solver
failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config
from .errors import ConfigError, DivergenceError, SearchError, StageError
from .fourier import Series2D
from .oscillator import even_power_obstruction
from .pipeline import (REPORT_SCHEMA, quasiperiodicity_check, residual_ladder,
                       scaling_scan, solve, write_json_report, write_orbit_csv,
                       write_scan_csv, write_sieve_csv)
from .resonance import certify_bounds, sieve_table, wave_operator

GOLDEN_OMEGA1 = 1.6180339887498949

_SIEVE_EXIT_STAGES = {"sieve", "certify", "sign", "scan-grid"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resonant-waves",
        description="quasi-periodic solutions of forced resonant wave equations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="scan a detuning interval")
    p.add_argument("--case", choices=["a", "b"], required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--interval", required=True, help="lo,hi")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--lmax", type=int, default=64)
    p.add_argument("--omega1", type=float, default=GOLDEN_OMEGA1)
    p.add_argument("--out", default="")

    for name in ("solve", "scan", "probe"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default="")

    p = sub.add_parser("verify", help="re-check a stored solution report")
    p.add_argument("--config", required=True)
    p.add_argument("--report", required=True)
    return parser


def _cmd_sieve(args) -> int:
    lo, hi = (float(tok) for tok in args.interval.split(","))
    points = sieve_table(args.case, (lo, hi), args.gamma, args.lmax,
                         args.count, omega1=args.omega1)
    accepted = sum(p.accepted for p in points)
    if args.out:
        write_sieve_csv(points, args.out)
    print(f"sieve: {accepted}/{len(points)} candidates accepted")
    return 0


def _cmd_solve(args) -> int:
    config = load_config(args.config)
    report = solve(config)
    out = args.out or config.out_json
    if out:
        write_json_report(report, out)
    if config.orbit_csv and config.case == "b":
        from .oscillator import limit_orbit
        nl = config.nonlinearity()
        mean_a = nl.coefficient(2 * nl.d - 1).get((0, 0)).real
        write_orbit_csv(limit_orbit(nl.d, mean_a, config.eps), config.orbit_csv)
    worst = max(report.residuals.values())
    print(f"solve[{config.case}]: residual(max over ladder) = {worst:.3e}, "
          f"masses = ({report.mass_phi1:.3e}, {report.mass_phi2:.3e})")
    return 0


def _cmd_scan(args) -> int:
    config = load_config(args.config)
    report = scaling_scan(config)
    out = args.out or config.out_json
    if out:
        write_json_report(report, out)
    if config.out_csv:
        write_scan_csv(report, config.out_csv)
    print(f"scan[{config.case}]: amplitude slope {report.amplitude_slope:.3f} "
          f"(expected {report.expected_amplitude_slope:.3f}), correction slope "
          f"{report.correction_slope:.3f} (expected {report.expected_correction_slope:.3f})")
    return 0


def _cmd_probe(args) -> int:
    config = load_config(args.config)
    if not (config.rho_grid and config.probe_eps):
        raise ConfigError("probe needs rho_grid and probe_eps")
    report = even_power_obstruction(config.probe_series(), config.probe_D,
                                    config.decomposition(), config.rho_grid,
                                    config.probe_eps)
    out = args.out or config.out_json
    if out:
        write_json_report({"schema": REPORT_SCHEMA, "D": report.D,
                           "mean_a": report.mean_a, "rows": report.rows,
                           "root_free": report.root_free}, out)
    print(f"probe: D={report.D}, root_free={report.root_free}")
    return 0 if report.root_free else 3


def _cmd_verify(args) -> int:
    config = load_config(args.config)
    with open(args.report) as fh:
        payload = json.load(fh)
    u = Series2D.from_json_dict(payload["u"])
    setup = config.setup()
    cert = certify_bounds(config.decomposition(), wave_operator(setup))
    if not cert.passes:
        print(f"verify: bound certificate failed at {cert.witness}",
              file=sys.stderr)
        return 2
    residuals = residual_ladder(u, setup, config.nonlinearity(), config.weights())
    qp = quasiperiodicity_check(u, config.tol_mass)
    worst = max(residuals.values())
    ok = worst <= config.verify_residual_max and qp["passes"]
    print(f"verify: residual {worst:.3e} (limit {config.verify_residual_max:.1e}), "
          f"quasiperiodic={qp['passes']}")
    return 0 if ok else 3


def cli_run(argv) -> int:
    """Run the CLI on an argument vector and return the exit code."""
    argv = list(argv)
    for i, tok in enumerate(argv[:-1]):
        # "--interval -1e-3,1e-3": keep argparse from reading the negative
        # bound as an option name
        if tok == "--interval":
            argv[i] = f"--interval={argv[i + 1]}"
            del argv[i + 1]
            break
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    handlers = {"sieve": _cmd_sieve, "solve": _cmd_solve, "scan": _cmd_scan,
                "probe": _cmd_probe, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if exc.stage in _SIEVE_EXIT_STAGES else 3
    except (DivergenceError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_run(sys.argv[1:]))


if __name__ == "__main__":
    main()
