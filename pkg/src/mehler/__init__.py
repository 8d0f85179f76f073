"""Closed-form heat kernels for -div(A grad) + <Bx, x> with commuting A, B.

The public surface re-exports the most used entry points; submodules hold
the rest.
"""

from .errors import (
    DomainError,
    MehlerError,
    NonCommuting,
    NotPositiveDefinite,
    OutOfRange,
    QuadratureNonConvergent,
    SingularCos,
    SingularD,
    SingularShooting,
    SingularTime,
    StepUnstable,
)
from .hamiltonics import BoundaryData, action, energy, eval_geodesic, shooting_oracle, solve_geodesic
from .kernels import (
    fourier_closed_form,
    kernel_gaussian,
    kernel_L,
    kernel_LS,
    kernel_LS_diag,
    kernel_mehler,
    kernel_ou,
    normalization_integral,
)
from .riccati import KernelCoefficients, assemble_ansatz, coefficients, ode_residuals, rk4_propagate_alpha
from .spectral import (
    BranchFunction,
    OperatorSpec,
    SpectralData,
    build_spectral,
    jacobi_eigh,
    matrix_function,
    scalar_branch,
    singular_times,
)

__version__ = "0.1.0"
