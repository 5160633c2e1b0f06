"""Semi-analytical solver for u_t - a^2 u_xx + b u = f on an interval with Robin ends.

The exact Laplace-domain solution, its numerical inversion, short-time
expansions at the ends, and two reference solvers.
"""

from .errors import (ConditioningError, DomainError, InversionError, NumericError,
                     QuadratureError, SpecError)
from .fields import SolutionField
from .functions import PiecewisePolynomial, SourceFunction, SpaceFunction, TimeFunction
from .inversion import FixedTalbot, GaverStehfest, invert, invert_grid, operational_field
from .kernels import (RField, gamma_inverse_chi, gauss_kernel, r_boundary_initial, r_field,
                      r_field_dx, r_time_derivative)
from .laplace import (BoundaryTraces, OperationalSolution, R_of, U_of, U_unbounded, Ux_of, chi,
                      cramer_traces, det_S, ode_residual, solve_traces)
from .oracles import compare_fields, fd_solve, series_solution, series_solve
from .problem import (BoundaryCondition, CaseKind, ProblemSpec, ValidationReport, classify_case,
                      load_spec, spec_from_dict, validate)
from .short_time import (ExpansionKernels, ShortTimeConfig, ShortTimeSolution,
                         boundary_flux_approx, boundary_value_approx, convolve_singular,
                         interior_approx, interior_flux_approx, laplace_consistency_check,
                         short_time_field)

__version__ = "0.1.0"
