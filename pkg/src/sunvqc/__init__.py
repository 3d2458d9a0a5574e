"""Statevector simulation and training of SU(4)-block variational circuits."""

from .ansatz import (
    CircuitLayout,
    Family,
    block_local_layout,
    block_unitary,
    brickwall_layout,
    circuit_param_count,
    circuit_state,
)
from .gradients import (
    GradientMethod,
    effective_generator,
    exact_gradient,
    finite_difference,
    shift_gradient,
    spectral_shift_rule,
    sun_block_gradient,
    two_term_shift,
)
from .linalg import (
    ValidationError,
    apply_1q,
    apply_block,
    expi_hermitian,
    partial_trace_keep,
    schmidt_singular_values,
)
from .objectives import classifier_output, schmidt_bound, trash_infidelity
from .pauli import hs_coefficients, lie_closure_dim, pauli_matrix, su_basis

__version__ = "0.1.0"
