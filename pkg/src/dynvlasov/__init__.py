"""Dynamic-domain semi-Lagrangian solver for kinetic transport equations
driven by velocity (transport) noise.

The package advances a phase-space density by tracing grid nodes backward
through volume-preserving inverse-flow integrators of the stochastic
characteristics, reconstructing with positivity-preserving multilinear
interpolation, and growing the velocity domain only when the density
actually reaches its boundary band.
"""

from .characteristics import (FieldEval, IntegratorKind, displacement_bound,
                              inverse_step, inverse_step_em, inverse_step_ltsm,
                              inverse_step_sem, inverse_step_ssm, jacobian_det)
from .diagnostics import (DiagnosticsRecord, kinetic_energy, lp_norm, mass,
                          momentum, record, reference_law_coeffs,
                          reference_laws, total_energy)
from .field import (CaseOneField, CaseTwoField, SigmaComponent, SigmaModel,
                    density_rho, make_field_eval, solve_field)
from .grid import (DensityField, DomainState, GridAlignmentError, PhaseGrid,
                   grow_grid, make_grid, sample_on_grid, update_halfwidth)
from .harness import (ConvergenceTable, MonteCarloResult, TimingRow,
                      run_convergence_study, run_monte_carlo, run_timing_study)
from .interpolation import (SplineInterpolant, interp_linear,
                            interp_linear_many, interp_spline)
from .io import (ConfigError, config_hash, load_config, parse_config,
                 read_snapshot, read_timeseries, save_config, serialize_config,
                 write_snapshot, write_timeseries)
from .noise import BrownianIncrements, coarsen, sample_path
from .solver import (FieldSpec, InitialSpec, NumericalAbort, RunResult,
                     SigmaSpec, SimulationConfig, choose_U0,
                     initial_density_landau, initial_density_two_stream,
                     initial_field, run, run_nonadaptive, step)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
