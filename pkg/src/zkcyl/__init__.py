"""Spectral solver for the 3D generalized Zakharov-Kuznetsov equation
under cylindrical symmetry: Fourier in x, two Chebyshev domains in rho,
implicit 2-stage Gauss time stepping, and a Newton-Krylov ground state.
"""

from .chebyshev import ChebKernel, cheb_coefficients, cheb_kernel, tail_magnitude
from .errors import ConfigurationError, SnapshotError, SolverFailure, StepFailure
from .fields import (
    Field,
    ModalField,
    Nonlinearity,
    abs_power,
    forward_x,
    gaussian_data,
    inverse_x,
    modal_rhs,
    scale_data,
    signed_power,
)
from .fourier import TorusGrid, make_torus_grid
from .radial import (
    RadialLayout,
    TransverseOperator,
    assemble_transverse,
    build_layout,
    inner_operator,
    outer_operator,
)
from .diagnostics import (
    DiagnosticsRecord,
    cone_half_angle,
    drift_report,
    energy,
    linf,
    make_record,
    mass,
)
from .gauss2 import BlowUpDetector, StageSolver, evolve, gauss2_tableau, precompute, step
from .groundstate import (
    GroundStateProfile,
    construct_ground_state,
    energy_mass_ratio,
    residual,
    shift_in_x,
    solve_ground_state,
)
from .config import SimConfig, load_config
from .scenarios import PRESETS, resume, run_from_config, run_scenario, solve_profile
from .snapshots import load_snapshot, save_snapshot

__version__ = "0.1.0"
