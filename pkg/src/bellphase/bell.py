"""Outcome probabilities, correlations, the CHSH Bell parameter and its maximisation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import ConvergenceError, DegenerateAnalyzerError, InvalidArgumentError, PreconditionError
from .jones import UnitaryDecomposition, decompose, require_unitary, rotation, wrap_phase
from .states import SWAP_HV, Family, apply_local, as_family, as_state

TSIRELSON = 2.0 * math.sqrt(2.0)

DEGENERATE_ALPHA_TOL = 1e-9

N_STARTS = 16
MAX_EVALS_PER_START = 10_000
_STARTS_SEED = 0x5EED_C45
_STARTS = np.random.default_rng(_STARTS_SEED).random((N_STARTS, 4)) * math.pi


@dataclass(frozen=True)
class OutcomeProbs:
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        vals = (self.p_pp, self.p_pm, self.p_mp, self.p_mm)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgumentError(f"non-finite probability in {vals}")
        if any(v < -1e-12 or v > 1.0 + 1e-12 for v in vals):
            raise PreconditionError(f"probabilities outside [0, 1]: {vals}")
        total = math.fsum(vals)
        if abs(total - 1.0) > 1e-12:
            raise PreconditionError(f"probabilities sum to {total!r}, not 1")
        for name, v in zip(("p_pp", "p_pm", "p_mp", "p_mm"), vals):
            object.__setattr__(self, name, min(1.0, max(0.0, float(v))))

    def as_array(self) -> np.ndarray:
        return np.array([self.p_pp, self.p_pm, self.p_mp, self.p_mm])


def _canon_angle(x: float) -> float:
    # analyzer angles act modulo pi; keep them in (-pi/2, pi/2]
    y = math.remainder(x, math.pi)
    if y <= -math.pi / 2:
        y += math.pi
    return y


@dataclass(frozen=True)
class AnalyzerSettings:
    """CHSH angle quadruple, each reduced modulo pi into (-pi/2, pi/2]."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidArgumentError(f"{name} must be finite")
            object.__setattr__(self, name, _canon_angle(float(v)))

    def pairs(self):
        """The four (alice, bob) pairs entering S, in the order of its terms."""
        return ((self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime))

    def as_tuple(self):
        return (self.a, self.a_prime, self.b, self.b_prime)


STANDARD_SETTINGS = AnalyzerSettings(0.0, math.pi / 4, math.pi / 8, -math.pi / 8)


@dataclass(frozen=True)
class EffectivePhaseInputs:
    phi: float
    decomp_A: UnitaryDecomposition
    decomp_B: UnitaryDecomposition


def outcome_probs(state, t_a, t_b) -> OutcomeProbs:
    """Joint outcome probabilities by projecting ``state`` on the analyser rows."""
    s = as_state(state)
    amps = apply_local(s, require_unitary(t_a, "T_A"), require_unitary(t_b, "T_B"))
    p = np.abs(amps) ** 2
    return OutcomeProbs(*(float(x) for x in p / p.sum()))


def outcome_probs_batch(states: np.ndarray, t_a: np.ndarray, t_b: np.ndarray) -> np.ndarray:
    """Vectorised projection: ``states`` (n, 4), ``t_a``/``t_b`` (n, 2, 2) -> (n, 4)."""
    psi = np.asarray(states, dtype=complex).reshape(-1, 2, 2)
    amps = np.einsum("nai,nbj,nij->nab", np.conj(t_a), np.conj(t_b), psi)
    return (np.abs(amps) ** 2).reshape(-1, 4)


def reduce_phase(phi: float) -> tuple[float, bool]:
    """Map phi onto [0, pi]; the flag says whether Bob's angles must change sign.

    Uses phi = r + n*pi and the invariance of the probabilities under
    (phi + pi, b -> -b). The reduction is exact, so inputs differing by an
    exactly representable pi give identical outputs.
    """
    if not math.isfinite(phi):
        raise InvalidArgumentError(f"phi must be finite, got {phi!r}")
    r = math.remainder(phi, math.pi)
    n = round((phi - r) / math.pi)
    if r < 0.0:
        r += math.pi
        n -= 1
    return r, bool(n % 2)


def _closed_probs(r: float, a: float, b: float) -> OutcomeProbs:
    c2 = math.cos(r / 2.0) ** 2
    s2 = math.sin(r / 2.0) ** 2
    same = 0.5 * (c2 * math.cos(a - b) ** 2 + s2 * math.cos(a + b) ** 2)
    diff = 0.5 * (c2 * math.sin(a - b) ** 2 + s2 * math.sin(a + b) ** 2)
    return OutcomeProbs(same, diff, diff, same)


def rotating_analyzer_probs(phi: float, a: float, b: float) -> OutcomeProbs:
    """Closed-form probabilities for |Phi(phi)> behind analysers rotated by a and b."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidArgumentError("analyzer angles must be finite")
    r, flip = reduce_phase(phi)
    return _closed_probs(r, a, -b if flip else b)


def correlation(p: OutcomeProbs) -> float:
    e = p.p_pp - p.p_pm - p.p_mp + p.p_mm
    return min(1.0, max(-1.0, e))


ProbModel = Callable[[float, float], OutcomeProbs]


def bell_parameter(prob_model: ProbModel, s: AnalyzerSettings) -> float:
    """S = E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    e = [correlation(prob_model(x, y)) for x, y in s.pairs()]
    return e[0] + e[1] + e[2] - e[3]


def closed_form_model(phi: float) -> ProbModel:
    return lambda a, b: rotating_analyzer_probs(phi, a, b)


def rotating_analyzer_model(state) -> ProbModel:
    """Probability model of ``state`` seen through rotated polarising beam splitters."""
    s = as_state(state)
    return lambda a, b: outcome_probs(s, rotation(a), rotation(b))


def effective_phase(inputs: EffectivePhaseInputs) -> float:
    """State phase plus the analyser phases, wrapped to (-pi, pi]."""
    for name, d in (("A", inputs.decomp_A), ("B", inputs.decomp_B)):
        if d.alpha < DEGENERATE_ALPHA_TOL or d.alpha > math.pi / 2 - DEGENERATE_ALPHA_TOL:
            raise DegenerateAnalyzerError(
                f"analyzer {name} has alpha = {d.alpha!r}; its phase is undefined at 0 and pi/2"
            )
    da, db = inputs.decomp_A, inputs.decomp_B
    return wrap_phase(inputs.phi + da.phi + db.phi - da.phi_prime - db.phi_prime)


def phi_frame_b(family, t_b) -> np.ndarray:
    """Bob's analyser expressed against the |Phi>-type partner of the state.

    |Psi(phi)> is |Phi(phi)> with H and V exchanged on channel B, so a |Psi>
    measurement through T_B is a |Phi> measurement through T_B @ SWAP.
    """
    t_b = require_unitary(t_b, "T_B")
    return t_b @ SWAP_HV if as_family(family) is Family.PSI else t_b


def effective_phase_of(family, phi: float, t_a, t_b) -> float:
    """Effective phase of |Phi(phi)> or |Psi(phi)> analysed by concrete devices."""
    return effective_phase(EffectivePhaseInputs(phi, decompose(t_a), decompose(phi_frame_b(family, t_b))))


def optimal_settings_closed(phi: float) -> tuple[AnalyzerSettings, float]:
    """a = 0, a' = pi/4, b = -b' = arctan(cos phi)/2 and S_max = 2 sqrt(cos^2 phi + 1)."""
    r, flip = reduce_phase(phi)
    b = 0.5 * math.atan(math.cos(r))
    if flip:
        b = -b
    return AnalyzerSettings(0.0, math.pi / 4, b, -b), 2.0 * math.sqrt(math.cos(r) ** 2 + 1.0)


@dataclass(frozen=True)
class NumericOptimum:
    settings: AnalyzerSettings
    s: float
    evaluations: int


def maximize_bell_numeric(phi: float, tol: float = 1e-10, *, use_numba=None) -> NumericOptimum:
    """Derivative-free multi-start maximisation of S over the four analyser angles.

    Sixteen fixed pseudo-random starts; each runs coordinate-wise golden-section
    sweeps until a full sweep gains less than tol/10, capped at 10^4 objective
    evaluations per start. The best start wins (lowest index on ties).
    """
    if not (tol > 0 and math.isfinite(tol)):
        raise InvalidArgumentError(f"tol must be positive, got {tol!r}")
    r, flip = reduce_phase(phi)
    s, x, evals, converged = kernels.chsh_coordinate_ascent(r, _STARTS, tol, MAX_EVALS_PER_START, use_numba)
    best = int(np.argmax(s))
    if not converged[best]:
        raise ConvergenceError(f"best start did not converge within {MAX_EVALS_PER_START} evaluations (phi={phi!r})")
    a, ap, b, bp = (float(v) for v in x[best])
    if flip:
        b, bp = -b, -bp
    return NumericOptimum(AnalyzerSettings(a, ap, b, bp), float(s[best]), int(evals.sum()))
