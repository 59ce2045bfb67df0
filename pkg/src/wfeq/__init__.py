"""Multitype Wright-Fisher dynamics.

Deterministic replicator-style iteration driven by survival/direction
parameter matrices, interior equilibria from the inverse direction matrix,
the two-state closed forms, and a finite-population resampling layer whose
noise decomposes into a predictable step plus martingale differences.

Hot loops run in a compiled extension when built; `wfeq.backend_name()`
reports which kernels are active (see the WFEQ_BACKEND environment
variable).
"""

from ._backend import BACKEND_NAME as _BACKEND_NAME
from .binary import (
    BinaryModel,
    binary_drift,
    binary_equilibrium,
    binary_normalizer,
    binary_step,
    binary_trajectory,
)
from .dynamics import (
    BatchResult,
    Trajectory,
    Zone,
    balance_residual,
    classify_zones,
    fluctuation_drift,
    fluctuation_normalizer,
    iterate,
    iterate_batch,
    mean_fluctuation,
    zone_sign_agreement,
)
from .equilibrium import (
    EquilibriumProfile,
    diagonal_from_equilibrium,
    fluctuation_scalar_product,
    profile_from_equilibrium,
    solve_equilibrium,
)
from .errors import (
    DegenerateModel,
    DegenerateNormalizer,
    InadmissibleEquilibrium,
    ModelFormatError,
    NoSignChange,
    NonFiniteIterate,
    NotDiagonalModel,
    OutOfRangeDirection,
    SingularDirectionMatrix,
    WrightFisherError,
    ZeroMeanFitness,
)
from .model import (
    DirectionMatrix,
    SimplexVector,
    SurvivalMatrix,
    direction_normalizer,
    direction_transform,
    drift_direction_form,
    drift_numerator,
    fitness_component,
    increment_drift,
    mean_fitness,
    regression_step,
    scalar_product,
)
from .stochastic import (
    MartingaleRecord,
    MomentSummary,
    PopulationState,
    RandomSeed,
    SimulationResult,
    conditional_dispersion,
    martingale_difference,
    predictable_component,
    sample_next_generation,
    sample_transitions,
    simulate_paths,
)

__version__ = "0.1.0"


def backend_name() -> str:
    """Which kernel implementation is active: "compiled" or "python"."""
    return _BACKEND_NAME


__all__ = [
    "BatchResult",
    "BinaryModel",
    "DegenerateModel",
    "DegenerateNormalizer",
    "DirectionMatrix",
    "EquilibriumProfile",
    "InadmissibleEquilibrium",
    "MartingaleRecord",
    "ModelFormatError",
    "MomentSummary",
    "NoSignChange",
    "NonFiniteIterate",
    "NotDiagonalModel",
    "OutOfRangeDirection",
    "PopulationState",
    "RandomSeed",
    "SimplexVector",
    "SimulationResult",
    "SingularDirectionMatrix",
    "SurvivalMatrix",
    "Trajectory",
    "WrightFisherError",
    "ZeroMeanFitness",
    "Zone",
    "backend_name",
    "balance_residual",
    "binary_drift",
    "binary_equilibrium",
    "binary_normalizer",
    "binary_step",
    "binary_trajectory",
    "classify_zones",
    "conditional_dispersion",
    "diagonal_from_equilibrium",
    "direction_normalizer",
    "direction_transform",
    "drift_direction_form",
    "drift_numerator",
    "fitness_component",
    "fluctuation_drift",
    "fluctuation_normalizer",
    "fluctuation_scalar_product",
    "increment_drift",
    "iterate",
    "iterate_batch",
    "martingale_difference",
    "mean_fitness",
    "mean_fluctuation",
    "predictable_component",
    "profile_from_equilibrium",
    "regression_step",
    "sample_next_generation",
    "sample_transitions",
    "scalar_product",
    "simulate_paths",
    "solve_equilibrium",
    "zone_sign_agreement",
]
