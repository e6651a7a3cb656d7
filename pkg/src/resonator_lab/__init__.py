"""Exact finite-scale machinery for extremal character sums.

Subpackages cover sieves and arithmetic functions (arith), the character
group mod q with batch DFT sums (characters), friable-integer counting
(smooth), the resonator weight construction and its inequality chain
(resonator), and end-to-end experiment records (experiments).  The most
common entry points are re-exported here.
"""

from ._kernels import BACKEND as kernel_backend
from .characters import all_char_sums, build_group, char_sum, delta_max, evaluate
from .experiments import ExperimentSpec, conjecture_probe, levels_table, sweep, verify_instance
from .resonator import (
    build_weights,
    friable_minorant,
    resonance_moments,
    resonator_value,
    smoothness_level,
)
from .smooth import enumerate_smooth, psi, psi_coprime, psi_twisted, saddle_alpha

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "build_group",
    "evaluate",
    "char_sum",
    "all_char_sums",
    "delta_max",
    "enumerate_smooth",
    "psi",
    "psi_coprime",
    "psi_twisted",
    "saddle_alpha",
    "smoothness_level",
    "build_weights",
    "resonator_value",
    "resonance_moments",
    "friable_minorant",
    "verify_instance",
    "sweep",
    "ExperimentSpec",
    "conjecture_probe",
    "levels_table",
]
