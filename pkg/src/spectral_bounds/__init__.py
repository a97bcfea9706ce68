"""Sharp first-eigenvalue lower bounds from one-dimensional comparison problems."""

from .closed_forms import (explicit_bound_generalized, explicit_bound_kahler, explicit_bound_qk,
                           sup_interpolation)
from .eigensolver import (EigenResult, SolverConfig, eigenvalue_curve, rayleigh_quotient, solve,
                          solve_shooting, solve_weighted_fd)
from .errors import (CertificateError, CoefficientBlowupError, DisagreementError, DomainError,
                     ExtrapolationError, InvalidGeometryError, NoBracketError, SolverError,
                     StiffnessError)
from .heat_flow import (DecayReport, FlowCoefficients, FlowState, comparison_test, decay_rate,
                        evolve, step)
from .kernels import (c_kernel, c_kernel_general, s_kernel, t_kernel, t_kernel_general, t_max,
                      t_max_general)
from .model_spaces import (RadialModel, radial_first_eigenvalue, radial_first_eigenvalue_numeric,
                           sharpness_gap)
from .models import (ComparisonProblem, DriftSpec, DriftTerm, GeometryInput, dirichlet_problem,
                     generalized_problem, laplace_comparison_rhs, neumann_problem, weight)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
