"""Bell-CHSH analysis of elliptically polarised maximally entangled photon pairs."""

__version__ = "0.1.0"

from .bell import (
    STANDARD_SETTINGS,
    TSIRELSON,
    AnalyzerSettings,
    OutcomeProbs,
    bell_parameter,
    correlation,
    effective_phase,
    effective_phase_of,
    maximize_bell_numeric,
    optimal_settings_closed,
    outcome_probs,
    rotating_analyzer_probs,
)
from .compensation import (
    Scheme,
    compensate,
    experimental_settings,
    fixed_pair_settings,
    rotating_scheme_diagonal_scan,
    rotating_scheme_settings,
    verify_compensation,
)
from .errors import BellPhaseError
from .estimation import estimate_phase, harmonic_fit
from .jones import Element, chain, compose, decompose, named_element, rotation, waveplate
from .simulate import ScanSpec, SourceModel, scan_fringe, simulate_counts
from .states import Family, make_state

__all__ = [
    "__version__", "STANDARD_SETTINGS", "TSIRELSON", "AnalyzerSettings", "OutcomeProbs",
    "bell_parameter", "correlation", "effective_phase", "effective_phase_of", "maximize_bell_numeric",
    "optimal_settings_closed", "outcome_probs", "rotating_analyzer_probs", "Scheme", "compensate",
    "experimental_settings", "fixed_pair_settings", "rotating_scheme_diagonal_scan",
    "rotating_scheme_settings", "verify_compensation", "BellPhaseError", "estimate_phase",
    "harmonic_fit", "Element", "chain", "compose", "decompose", "named_element", "rotation",
    "waveplate", "ScanSpec", "SourceModel", "scan_fringe", "simulate_counts", "Family", "make_state",
]
