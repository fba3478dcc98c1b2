"""Dissipative preparation of generalised Bell states in a lossy cavity.

Library layout:

  linalg      dense complex kernels (tensor products, LU inversion,
              matrix exponential, Hermitian eigen-diagnostics)
  model       parameters, bare 18-dim operators, the theta-adapted
              single-excitation basis and its closed-form operators
  effective   adiabatic elimination: H_NH, propagator scalars/blocks,
              numerically derived and closed-form reduced operators
  dynamics    Lindblad integrators (RK4, propagator stepping),
              observables, steady states
  protocol    channel amplitudes, regime classification, detuning
              engineering, cooperativity
  validate    cross-check suite tying every redundant route together
  cli         the `bellcav` command-line interface
"""

from ._kernels import BACKEND as kernel_backend
from .effective import (
    EffectiveModel,
    PropagatorBlocks,
    PropagatorScalars,
    banachiewicz_invert,
    build_H_NH,
    closed_form_blocks,
    closed_form_effective,
    derive_effective_model,
    propagator_scalars,
)
from .model import (
    BasisB,
    Modulation,
    OperatorSet,
    ScaledParameters,
    SystemParameters,
    appendix_operators,
    build_bare_operators,
    build_basis_B,
    f_value,
    from_scaled,
    project_to_B,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    evolve,
    ground_populations,
    lindblad_rhs,
    liouvillian_matrix,
    steady_state,
)
from .protocol import (
    channel_amplitudes,
    cooperativity,
    engineer_detunings,
    regime_classifier,
)

__version__ = "0.1.0"
