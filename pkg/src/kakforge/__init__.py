"""KAK factorization of n-qubit unitaries and circuit synthesis."""

from .circuit import Circuit, Gate, evaluate, expand_circuit
from .involution import CartanInvolution, apply_theta
from .kak import H1, H2, KakError, KakFactors, kak_decompose, verify_factors
from .qft import qft_matrix
from .rng import SplitMix64
from .synth import SynthOptions, elementary_gate_count, synthesize

__version__ = "0.1.0"

__all__ = [
    "CartanInvolution", "Circuit", "Gate", "H1", "H2", "KakError", "KakFactors",
    "SplitMix64", "SynthOptions", "apply_theta", "elementary_gate_count", "evaluate",
    "expand_circuit", "kak_decompose", "qft_matrix", "synthesize", "verify_factors",
]
