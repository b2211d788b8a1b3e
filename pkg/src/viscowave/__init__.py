"""viscowave: spectral simulation and boundary control of waves with memory.

The package simulates second-order wave dynamics whose elastic operator
acts through a convolution memory kernel, and synthesizes boundary
controls by solving the discrete moment problem of the associated
exponential family.  Numerical diagnostics quantify how the boundary
controllability of the memoryless system carries over to the one with
memory.
"""

from .basis import (EigenBasis, basis_from_csv, basis_to_csv,
                    check_weyl_asymptotics, interval_basis, rectangle_basis)
from .control import (ControlSignal, MinNormResult, MomentMatrix,
                      build_elastic_moment_matrix,
                      build_viscoelastic_moment_matrix, min_norm_control,
                      reachability_gap, steer_and_verify, terminal_error,
                      zero_damping_frame)
from .cosine import (CoeffState, apply_cosine, apply_generator_power,
                     apply_sine, coeffs_from_csv, coeffs_to_csv,
                     cosine_product_residual, elastic_solution)
from .errors import ConfigError, GuardError
from .kernels import (MacCamyForm, MemoryKernel, ResolventKernel,
                      maccamy_constants, march_resolvent, reduced_form,
                      resolvent_kernel, verify_resolvent_identity)
from .modal import (ModalTrajectory, boundary_response_kernel,
                    geometric_tail_bound, maccamy_equivalence_residual,
                    march_modal_volterra, picard_series, picard_term_norms,
                    solve_modal_maccamy, solve_modal_memory)
from .quadrature import causal_convolve, uniform_grid
from .verification import (InequalityReport, direct_inequality_ratio,
                           inverse_inequality_constant, orthogonality_test,
                           trace_energy_ratio)

__version__ = "0.1.0"

__all__ = [
    "CoeffState", "ConfigError", "ControlSignal", "EigenBasis", "GuardError",
    "InequalityReport", "MacCamyForm", "MemoryKernel", "MinNormResult",
    "ModalTrajectory", "MomentMatrix", "ResolventKernel",
    "apply_cosine", "apply_generator_power", "apply_sine", "basis_from_csv",
    "basis_to_csv", "boundary_response_kernel", "build_elastic_moment_matrix",
    "coeffs_from_csv", "coeffs_to_csv",
    "build_viscoelastic_moment_matrix", "causal_convolve",
    "check_weyl_asymptotics", "cosine_product_residual",
    "direct_inequality_ratio", "elastic_solution", "geometric_tail_bound",
    "interval_basis", "inverse_inequality_constant", "maccamy_constants",
    "maccamy_equivalence_residual", "march_modal_volterra", "march_resolvent",
    "min_norm_control", "orthogonality_test", "picard_series",
    "picard_term_norms", "reachability_gap", "rectangle_basis",
    "reduced_form", "resolvent_kernel", "solve_modal_maccamy",
    "solve_modal_memory", "steer_and_verify", "terminal_error",
    "trace_energy_ratio", "uniform_grid", "verify_resolvent_identity",
    "zero_damping_frame",
]
