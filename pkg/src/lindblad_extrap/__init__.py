"""Lindblad simulation with zero-step-size extrapolation.

Simulate open-system dynamics with two first-order integrators, sample
observables with shot noise, extrapolate curves to step size zero over
quantized Chebyshev grids, and verify the coefficient bounds that make the
extrapolation well-conditioned.
"""

from .extrapolation import (
    ExtrapolationResult,
    ExtrapolationWeights,
    extrapolate,
    lebesgue_at_zero,
    regression_weights,
    richardson_weights,
)
from .grids import (
    StepGrid,
    chebyshev_grid,
    equidistant_grid,
    quantize_grid,
    recommended_interval,
)
from .integrators import (
    IntegratorKind,
    Trajectory,
    dilated_hamiltonian,
    dilated_step,
    evolve,
    kraus_step,
    partial_trace_ancilla,
)
from .model import (
    DensityMatrix,
    LindbladModel,
    Observable,
    expectation,
    generator_bound,
    lindblad_apply,
    rescale_model,
    trace_norm,
)
from .reference import GammaSolution, ReferenceSolution, exact_evolve, gamma_ode_solve
from .sampling import ShotEstimate, hoeffding_shots, measure_shots, noisy_curve
from .theory import (
    BoundReport,
    DilationExpansion,
    GeneratingSequence,
    GevreyConstants,
    ResourceReport,
    SequenceVariant,
    build_sequence,
    dilation_expansion,
    gevrey_constants,
    m2_bound,
    resource_estimates,
    verify_bound,
)
from .zoo import TfimParams, build_tfim, random_model

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "LindbladModel",
    "Observable",
    "IntegratorKind",
    "Trajectory",
    "StepGrid",
    "ExtrapolationWeights",
    "ExtrapolationResult",
    "ShotEstimate",
    "GeneratingSequence",
    "GevreyConstants",
    "DilationExpansion",
    "BoundReport",
    "ResourceReport",
    "SequenceVariant",
    "GammaSolution",
    "ReferenceSolution",
    "TfimParams",
    "lindblad_apply",
    "generator_bound",
    "trace_norm",
    "expectation",
    "rescale_model",
    "exact_evolve",
    "gamma_ode_solve",
    "kraus_step",
    "dilated_hamiltonian",
    "dilated_step",
    "evolve",
    "partial_trace_ancilla",
    "equidistant_grid",
    "chebyshev_grid",
    "quantize_grid",
    "recommended_interval",
    "richardson_weights",
    "regression_weights",
    "extrapolate",
    "lebesgue_at_zero",
    "measure_shots",
    "hoeffding_shots",
    "noisy_curve",
    "build_sequence",
    "verify_bound",
    "gevrey_constants",
    "m2_bound",
    "dilation_expansion",
    "resource_estimates",
    "build_tfim",
    "random_model",
]
