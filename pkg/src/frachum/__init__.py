"""Regional controllability and HUM minimum-energy control for the 1-D
time-fractional (Caputo) diffusion equation on [0, 1] with Dirichlet
boundary conditions, realized in a truncated sine eigenbasis."""

from frachum.actuators import ActuatorSpec, ModeGains, apply_B_star, mode_gains
from frachum.controllability import ControllabilityReport, analyze, reachable_component
from frachum.dynamics import (
    ControlSignal,
    QuadratureConfig,
    duhamel_integral,
    free_evolution,
    kernel_coeff,
    mild_solution,
)
from frachum.errors import (
    DomainError,
    EvaluationError,
    InputError,
    QuadratureError,
    UnreachableTargetError,
)
from frachum.hum import (
    HUMSolution,
    LambdaOperator,
    TimeGramian,
    assemble_gramian,
    assemble_lambda,
    control_energy,
    solve_hum,
    verify_minimality,
    zstar_norm,
)
from frachum.mlf import (
    MLFConfig,
    mittag_leffler,
    mittag_leffler_array,
    phi_moment_check,
    wright_density,
)
from frachum.spectral import (
    EigenBasis,
    Region,
    RegionMass,
    SpectralField,
    build_basis,
    evaluate_field,
    expand_function,
    region_mass,
    restrict_norm,
)

__version__ = "0.1.0"
