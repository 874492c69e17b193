"""One-clean-qubit trace estimation and noise-tolerant parity learning."""

__version__ = "0.1.0"

from .circuits import RotationSpec, as_bits, bits_to_str, build_parity_unitary, rx
from .dqc1 import (
    Dqc1Config,
    EstimateRecord,
    analytic_expectations,
    expectations_from_tau,
    initial_state,
    probe_expectations,
    run_protocol,
    sample_expectations,
)
from .infomeasures import (
    DiscordResult,
    binary_entropy,
    coherence_consumption,
    mutual_information,
    quantum_discord,
)
from .lpn import (
    BudgetExhaustedError,
    BudgetParams,
    LearnResult,
    closed_form_tau,
    delta_tau,
    learn,
    make_oracle,
    query_budget,
)
from .noise import NoiseSpec, midcircuit_noise_experiment, phase_flip_parity_experiment
from .qstate import DensityMatrix, KrausSet, OperatorMatrix, partial_trace, tensor

__all__ = [
    "__version__",
    "RotationSpec",
    "as_bits",
    "bits_to_str",
    "build_parity_unitary",
    "rx",
    "Dqc1Config",
    "EstimateRecord",
    "analytic_expectations",
    "expectations_from_tau",
    "initial_state",
    "probe_expectations",
    "run_protocol",
    "sample_expectations",
    "DiscordResult",
    "binary_entropy",
    "coherence_consumption",
    "mutual_information",
    "quantum_discord",
    "BudgetExhaustedError",
    "BudgetParams",
    "LearnResult",
    "closed_form_tau",
    "delta_tau",
    "learn",
    "make_oracle",
    "query_budget",
    "NoiseSpec",
    "midcircuit_noise_experiment",
    "phase_flip_parity_experiment",
    "DensityMatrix",
    "KrausSet",
    "OperatorMatrix",
    "partial_trace",
    "tensor",
]
