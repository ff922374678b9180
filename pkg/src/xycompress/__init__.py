"""Compressed matchgate simulation of XY spin chains."""

__version__ = "0.1.0"

from .fermion import Boundary, ChainSpec, GeneratorKind, XYChain, build_generator, rotation
from .matchgate import (
    GateKind,
    MatchgateCircuit,
    ParametricGate,
    compress_generic,
    r_of_circuit,
    statevector_run,
)
from .schedule import StepRule, TrotterSchedule, steps_from_rule
from .compressed import CompressedGateList, compile_step, v_matrix, w_factor, w_of_schedule
from .protocols import (
    kink_scaling_fit,
    magnetization_sweep,
    propagation_speed,
    quench_run,
    quench_series,
    timeevo_profile,
)
from .spectrum import (
    bogoliubov,
    brute_force_labels,
    gap_curves,
    ground_magnetization,
    quadratic_form,
    spectrum,
)

__all__ = [
    "__version__",
    "Boundary", "ChainSpec", "GeneratorKind", "XYChain", "build_generator", "rotation",
    "GateKind", "MatchgateCircuit", "ParametricGate", "compress_generic", "r_of_circuit",
    "statevector_run",
    "StepRule", "TrotterSchedule", "steps_from_rule",
    "CompressedGateList", "compile_step", "v_matrix", "w_factor", "w_of_schedule",
    "kink_scaling_fit", "magnetization_sweep", "propagation_speed", "quench_run",
    "quench_series", "timeevo_profile",
    "bogoliubov", "brute_force_labels", "gap_curves", "ground_magnetization", "quadratic_form",
    "spectrum",
]
