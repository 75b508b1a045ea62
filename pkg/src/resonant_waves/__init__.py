"""Spectral solver for small-amplitude quasi-periodic waves of periodically
forced, completely resonant wave equations on the circle.

The solver works in rotated torus variables: after a Diophantine sieve on
the detuning, the range components are solved by contraction, and the
kernel (bifurcation) equation is closed either variationally (rational
forcing frequency, linking saddle point) or by continuation of the limit
oscillator orbit (irrational forcing frequency).
"""

from .config import RunConfig, load_config, parse_config_text
from .errors import (ConfigError, DivergenceError, RadiusError, SearchError,
                     StageError, SupportError, UncertifiedError)
from .fourier import (Nonlinearity, Series2D, SpaceWeights, TruncationPolicy,
                      cosine_table_series, derivative, evaluate, evaluate_grid,
                      h1_component_norm, inner, integral, mean, multiply,
                      power, weighted_norm)
from .linking import (FunctionalValue, GeometryReport, LinkingGeometry,
                      SearchResult, action_identity_gap, bare_functional,
                      cutoff, default_geometry, default_seeds,
                      extended_functional, find_critical_point,
                      nontriviality_check, quadratic_form, reduced_functional,
                      verify_saddle_geometry)
from .oscillator import (LimitOrbit, ObstructionReport, continue_orbit,
                         energy_for_period, even_power_obstruction,
                         limit_orbit, monodromy, orbit_integral,
                         orbit_integral_closed_form, period, period_derivative)
from .pipeline import (ScanReport, SolutionReport, pde_residual,
                       quasiperiodicity_check, residual_ladder, scaling_scan,
                       solve, solve_case_a, solve_case_b, write_json_report,
                       write_orbit_csv, write_scan_csv, write_sieve_csv)
from .range_solver import (RangeSolution, assemble, sensitivity,
                           solve_range_equation, solve_range_system,
                           translation_equivariance_gap)
from .resonance import (Certificate, Decomposition, DiagonalOperator,
                        FrequencySetup, SievePoint, SieveResult, accepts_eps,
                        accepts_pair, apply_symbol, certify_bounds,
                        eigenvalue, invert_kernel_tail, invert_on_range,
                        kernel_operator, project, rational_convergent,
                        setup_with_eps, sieve_interval, sieve_table,
                        validate_pairing, validate_weights_for_case,
                        wave_operator)

__version__ = "0.1.0"
