"""spintwist: exact spin-squeezing dynamics of a two-cavity collective-spin
model and its dispersive two-axis reduction."""

__version__ = "0.1.0"

from .spin_algebra import (
    BasisSpec,
    QuantumState,
    SpinOperatorSet,
    build_spin_ops,
    coherent_state_down,
    parity_operator,
)
from .cavity_field import FockOperatorSet, build_fock_ops, tensor_assemble
from .model_builder import (
    EliminationReport,
    ModelValidationError,
    RamanDriveParams,
    TwoAxisParams,
    TwoModeDickeParams,
    build_two_axis,
    build_two_mode_dicke,
    derive_effective_params,
    dispersive_ratio,
    map_to_two_axis,
    vacuum_product_state,
)
from .propagator import EvolutionPlan, NormDriftError, SpectralPropagator, evolve
from .squeezing import (
    DegenerateFrameError,
    MeanSpinFrame,
    SqueezingTrace,
    default_window,
    find_max_squeezing,
    mean_spin_frame,
    min_transverse_variance,
    squeezing_factor,
    squeezing_trace,
)
from .experiments import (
    ComparisonResult,
    CutoffReport,
    ScalingFit,
    SweepResult,
    compare_full_vs_effective,
    convergence_audit,
    default_omega0_grid,
    max_squeezing_point,
    sweep_chi,
    sweep_omega0,
    sweep_scaling,
)

__all__ = [name for name in dir() if not name.startswith("_")]
