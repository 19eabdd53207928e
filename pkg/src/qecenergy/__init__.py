"""Noisy statevector simulation of small QEC codes under the coefficient-
precision noise model, with control-energy accounting."""

__version__ = "0.1.0"

from .circuit import Circuit, ShotOutcome, circuit_energy, execute_shot, ideal_outcome
from .codes import CodeSpec, build_protected_computation, get_code, pipeline
from .gates import (
    EnergyBudget,
    GateSpec,
    NoiseModel,
    average_gate_fidelity,
    estimate_gate_error,
    gate_catalog,
    gate_energy_bound,
    sample_noisy_gate,
)
from .statevector import (
    HermitianGenerator,
    StateVector,
    apply_unitary,
    expectation_z,
    herm_expm,
    init_basis_state,
    measure_z,
)

__all__ = [
    "Circuit",
    "CodeSpec",
    "EnergyBudget",
    "GateSpec",
    "HermitianGenerator",
    "NoiseModel",
    "ShotOutcome",
    "StateVector",
    "apply_unitary",
    "average_gate_fidelity",
    "build_protected_computation",
    "circuit_energy",
    "estimate_gate_error",
    "execute_shot",
    "expectation_z",
    "gate_catalog",
    "gate_energy_bound",
    "get_code",
    "herm_expm",
    "ideal_outcome",
    "init_basis_state",
    "measure_z",
    "pipeline",
    "sample_noisy_gate",
]
