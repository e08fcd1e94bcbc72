"""Device settings that cancel the state phase, for three compensation schemes.

ROTATING     rotating compensator (zeta_A, chi_A) on A, compensator at pi/4 (chi_B) on B
FIXED_PAIR   compensators at 0 (chi_1A) then pi/4 (chi_2A) on A, compensator at pi/4 (chi_B) on B
EXPERIMENTAL compensator at 0 (chi_2A) then half-wave plate (zeta_1A) on A, half-wave plate (zeta_B) on B

The closed-form setting formulas only *generate* candidates. The phase knob
of each scheme is solved against phases read off the actual Jones matrices,
and every returned setting is checked to give a zero effective phase.

Bob's analysis angle maps onto his device differently for the two state
families because |Psi> carries H and V swapped on channel B:
compensators use chi_B = 2*alpha_B (PHI) or pi - 2*alpha_B (PSI), half-wave
plates zeta_B = alpha_B/2 (PHI) or pi/4 - alpha_B/2 (PSI).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .bell import (
    STANDARD_SETTINGS,
    AnalyzerSettings,
    correlation,
    effective_phase_of,
    outcome_probs,
    phi_frame_b,
)
from .errors import BellPhaseError, DegenerateAnalyzerError, DomainError, InvalidArgumentError
from .jones import Element, compose, decompose, named_element, waveplate, wrap_phase, wrap_positive
from .states import SWAP_HV, Family, as_family, make_state

VERIFY_TOL = 1e-9
_ARCSIN_SLACK = 1e-12


class Scheme(enum.Enum):
    ROTATING = "rotating"
    FIXED_PAIR = "fixed_pair"
    EXPERIMENTAL = "experimental"


def as_scheme(value) -> Scheme:
    if isinstance(value, Scheme):
        return value
    try:
        return Scheme(str(value).lower().replace("-", "_"))
    except ValueError:
        raise InvalidArgumentError(f"unknown scheme {value!r}") from None


@dataclass(frozen=True)
class RotatingCompSettings:
    chi_A: float
    zeta_A: float
    chi_B: float

    def devices(self):
        return waveplate(self.zeta_A, self.chi_A), named_element(Element.COMP_AT_45, self.chi_B)


@dataclass(frozen=True)
class FixedPairSettings:
    chi_1A: float
    chi_2A: float
    chi_B: float

    def devices(self):
        t_a = compose(named_element(Element.COMP_AT_0, self.chi_1A), named_element(Element.COMP_AT_45, self.chi_2A))
        return t_a, named_element(Element.COMP_AT_45, self.chi_B)


@dataclass(frozen=True)
class ExperimentalSettings:
    zeta_1A: float
    chi_2A: float
    zeta_B: float

    def __post_init__(self):
        # a half-wave plate repeats (up to sign) every pi/2
        for name in ("zeta_1A", "zeta_B"):
            z = math.remainder(getattr(self, name), math.pi / 2)
            if z <= -math.pi / 4:
                z += math.pi / 2
            object.__setattr__(self, name, z)

    def devices(self):
        return experimental_chain(self)


@dataclass(frozen=True)
class CompensationReport:
    phi_eff: float
    s_at_chsh: float
    settings_echo: object = None
    correlations: tuple = field(default=())


def _bob_compensator(family: Family, alpha_b: float) -> float:
    return 2.0 * alpha_b if family is Family.PHI else math.pi - 2.0 * alpha_b


def _bob_half_wave(family: Family, alpha_b: float) -> float:
    return 0.5 * alpha_b if family is Family.PHI else math.pi / 4 - 0.5 * alpha_b


def _bob_offset(family: Family, t_b) -> float:
    """phi_B - phi'_B of Bob's device in the |Phi> frame."""
    d = decompose(phi_frame_b(family, t_b))
    return d.phi - d.phi_prime


def _alice_offset(t_a) -> float:
    d = decompose(t_a)
    return d.phi - d.phi_prime


def _nondegenerate(t) -> bool:
    a = decompose(t).alpha
    return VERIFY_TOL < a < math.pi / 2 - VERIFY_TOL


def _check_zero_phase(family: Family, phi: float, t_a, t_b, what: str) -> None:
    if not (_nondegenerate(t_a) and _nondegenerate(phi_frame_b(family, t_b))):
        # at alpha = 0 or pi/2 one product term vanishes and the phase has no effect
        return
    pe = effective_phase_of(family, phi, t_a, t_b)
    if abs(pe) > VERIFY_TOL:
        raise BellPhaseError(f"{what}: matrix check failed, effective phase {pe!r} != 0")


def _finite(**kw) -> None:
    for k, v in kw.items():
        if not math.isfinite(v):
            raise InvalidArgumentError(f"{k} must be finite, got {v!r}")


# ---------------------------------------------------------------------------
# rotating compensator
# ---------------------------------------------------------------------------

def _rotating_alice(phi_equiv: float, alpha_a: float) -> tuple[float, float]:
    """(chi_A, zeta_A) giving h = cos(alpha) e^{-i phi_equiv}, v = i sin(alpha)."""
    w = wrap_phase(phi_equiv)
    chi = 2.0 * math.acos(max(-1.0, min(1.0, math.cos(alpha_a) * math.cos(w))))
    half = math.sin(chi / 2.0)
    if alpha_a == 0.0:
        ratio = 0.0
    else:
        ratio = math.sin(alpha_a) / half
    if ratio > 1.0 + _ARCSIN_SLACK:
        raise DomainError(f"arcsin argument {ratio!r} > 1 (alpha_A={alpha_a!r}, phi={phi_equiv!r})")
    # same angle as asin(ratio), but without the precision loss near ratio = 1
    zeta = 0.5 * math.atan2(math.sin(alpha_a), math.cos(alpha_a) * abs(math.sin(w)))
    if w >= 0.0:
        return chi, -zeta
    # sin(phi) < 0: rotate the plate by pi/2, which reverses the retardation
    return wrap_positive(-chi), zeta


def rotating_arcsin_argument(phi: float, alpha_a: float) -> float:
    """sin(alpha_A) / sin(chi_A / 2) for the rotating-compensator formula."""
    chi = 2.0 * math.acos(math.cos(alpha_a) * math.cos(phi))
    return math.sin(alpha_a) / math.sin(chi / 2.0)


def rotating_scheme_settings(phi: float, alpha_A: float, alpha_B: float, family=Family.PHI) -> RotatingCompSettings:
    family = as_family(family)
    _finite(phi=phi, alpha_A=alpha_A, alpha_B=alpha_B)
    if not 0.0 < alpha_A < math.pi / 2:
        raise DomainError(f"alpha_A must lie in (0, pi/2), got {alpha_A!r}")
    if not 0.0 <= alpha_B <= math.pi / 2:
        raise DomainError(f"alpha_B must lie in [0, pi/2], got {alpha_B!r}")
    chi_b = wrap_positive(_bob_compensator(family, alpha_B))
    theta_b = _bob_offset(family, named_element(Element.COMP_AT_45, _bob_compensator(family, math.pi / 4)))
    # Alice must supply phi_A - phi'_A = -(phi + theta_B); her plate realises -phi_equiv - pi/2
    phi_equiv = phi + theta_b - math.pi / 2
    chi_a, zeta_a = _rotating_alice(phi_equiv, alpha_A)
    out = RotatingCompSettings(chi_A=chi_a, zeta_A=zeta_a, chi_B=chi_b)
    _check_zero_phase(family, phi, *out.devices(), what="rotating scheme")
    return out


def rotating_scheme_diagonal_scan(chi_A: float) -> tuple[float, float]:
    """Plate angle keeping alpha_A = pi/4 at retardation chi_A, and the resulting phase.

    The phase is read from the actual matrix as arg(h) in the representative
    with v = i|v|, so that in the diagonal basis P++ = cos^2((phi + phi_A)/2) / 2.
    """
    _finite(chi_A=chi_A)
    lo, hi = math.pi / 2, 3 * math.pi / 2
    if not (lo - 1e-12 <= chi_A <= hi + 1e-12):
        raise DomainError(f"chi_A = {chi_A!r} outside the diagonal scan window [pi/2, 3*pi/2]")
    chi = min(hi, max(lo, chi_A))
    # asin(1 / (sqrt2 sin(chi/2))), written to stay accurate at the window edges
    zeta = -0.5 * math.atan2(1.0, math.sqrt(max(0.0, -math.cos(chi))))
    d = decompose(waveplate(zeta, chi))
    phi_a = wrap_phase(d.phi - d.phi_prime + math.pi / 2)
    return zeta, phi_a


# ---------------------------------------------------------------------------
# pair of fixed compensators
# ---------------------------------------------------------------------------

def fixed_pair_settings(phi: float, alpha_A: float, alpha_B: float, family=Family.PHI) -> FixedPairSettings:
    family = as_family(family)
    _finite(phi=phi, alpha_A=alpha_A, alpha_B=alpha_B)
    chi_2a = 2.0 * alpha_A
    chi_b = _bob_compensator(family, alpha_B)
    # the phase knob enters Alice's offset as -chi_1A; solve at the diagonal reference
    ref = FixedPairSettings(0.0, math.pi / 2, _bob_compensator(family, math.pi / 4))
    t_a0, t_b0 = ref.devices()
    kappa = _alice_offset(t_a0) + _bob_offset(family, t_b0)
    chi_1a = wrap_positive(phi + kappa)
    out = FixedPairSettings(chi_1a, wrap_positive(chi_2a), wrap_positive(chi_b))
    _check_zero_phase(family, phi, *out.devices(), what="fixed-pair scheme")
    return out


# ---------------------------------------------------------------------------
# experimental chain: compensator at 0, then half-wave plates and PBS
# ---------------------------------------------------------------------------

def experimental_chain(s: ExperimentalSettings):
    t_a = compose(named_element(Element.COMP_AT_0, s.chi_2A), named_element(Element.HALF_WAVE, s.zeta_1A))
    return t_a, named_element(Element.HALF_WAVE, s.zeta_B)


def experimental_settings(phi: float, alpha_A: float, alpha_B: float, family=Family.PSI) -> ExperimentalSettings:
    family = as_family(family)
    _finite(phi=phi, alpha_A=alpha_A, alpha_B=alpha_B)
    ref = ExperimentalSettings(math.pi / 8, 0.0, _bob_half_wave(family, math.pi / 4))
    t_a0, t_b0 = experimental_chain(ref)
    kappa = _alice_offset(t_a0) + _bob_offset(family, t_b0)
    chi_2a = wrap_positive(phi + kappa)
    out = ExperimentalSettings(0.5 * alpha_A, chi_2a, _bob_half_wave(family, alpha_B))
    _check_zero_phase(family, phi, *out.devices(), what="experimental chain")
    return out


def scheme_settings(scheme, phi: float, alpha_A: float = math.pi / 4, alpha_B: float = math.pi / 4, family=Family.PHI):
    scheme = as_scheme(scheme)
    if scheme is Scheme.ROTATING:
        return rotating_scheme_settings(phi, alpha_A, alpha_B, family)
    if scheme is Scheme.FIXED_PAIR:
        return fixed_pair_settings(phi, alpha_A, alpha_B, family)
    return experimental_settings(phi, alpha_A, alpha_B, family)


def chsh_devices(scheme, family, phi: float, settings: AnalyzerSettings = STANDARD_SETTINGS):
    """Concrete device pairs for the four CHSH terms, compensated once for ``phi``.

    The phase knob is fixed by compensating in the diagonal basis; only the
    analysis knobs move between terms, so signed analysis angles keep their
    sign. For ROTATING both of Alice's knobs depend on alpha_A, so her angles
    must lie in [0, pi/2).
    """
    scheme = as_scheme(scheme)
    family = as_family(family)
    pairs = []
    if scheme is Scheme.FIXED_PAIR:
        chi_1a = fixed_pair_settings(phi, math.pi / 4, math.pi / 4, family).chi_1A
        for a, b in settings.pairs():
            pairs.append(FixedPairSettings(chi_1a, 2 * a, _bob_compensator(family, b)).devices())
    elif scheme is Scheme.EXPERIMENTAL:
        chi_2a = experimental_settings(phi, math.pi / 4, math.pi / 4, family).chi_2A
        for a, b in settings.pairs():
            pairs.append(experimental_chain(ExperimentalSettings(a / 2, chi_2a, _bob_half_wave(family, b))))
    else:
        theta_b = _bob_offset(family, named_element(Element.COMP_AT_45, _bob_compensator(family, math.pi / 4)))
        for a, b in settings.pairs():
            if not 0.0 <= a < math.pi / 2:
                raise DomainError(f"rotating scheme needs alpha_A in [0, pi/2), got {a!r}")
            chi_a, zeta_a = _rotating_alice(phi + theta_b - math.pi / 2, a)
            pairs.append(RotatingCompSettings(chi_a, zeta_a, _bob_compensator(family, b)).devices())
    return pairs


def chsh_from_devices(family, phi: float, device_pairs) -> float:
    """S from full projection of the state on each (T_A, T_B) pair, in CHSH term order."""
    state = make_state(family, phi)
    e = [correlation(outcome_probs(state, t_a, t_b)) for t_a, t_b in device_pairs]
    return e[0] + e[1] + e[2] - e[3]


def verify_compensation(
    state_phi: float,
    family,
    T_A,
    T_B,
    chsh_alpha_settings: AnalyzerSettings = STANDARD_SETTINGS,
    settings_echo=None,
) -> CompensationReport:
    """Effective phase and CHSH value of a compensated analyser pair.

    Both devices are decomposed; the CHSH terms are evaluated by projecting the
    state on analysers that keep each device's phases and global phase but take
    the requested analysis angle (a negative angle flips the sign of v).
    """
    family = as_family(family)
    state = make_state(family, state_phi)
    dec_a = decompose(T_A)
    dec_b = decompose(phi_frame_b(family, T_B))
    for name, d in (("A", dec_a), ("B", dec_b)):
        if not VERIFY_TOL < d.alpha < math.pi / 2 - VERIFY_TOL:
            raise DegenerateAnalyzerError(f"device {name} has alpha = {d.alpha!r}; phases undefined")
    phi_eff = effective_phase_of(family, state_phi, T_A, T_B)
    corr = []
    for a, b in chsh_alpha_settings.pairs():
        ta = dec_a.with_alpha(a).matrix()
        tb = dec_b.with_alpha(b).matrix()
        if family is Family.PSI:
            tb = tb @ SWAP_HV
        corr.append(correlation(outcome_probs(state, ta, tb)))
    s = corr[0] + corr[1] + corr[2] - corr[3]
    return CompensationReport(phi_eff, s, settings_echo, tuple(corr))


def compensate(scheme, family, phi: float, alpha_A: float = math.pi / 4, alpha_B: float = math.pi / 4,
               chsh: AnalyzerSettings = STANDARD_SETTINGS) -> CompensationReport:
    """Generate a scheme's settings for ``phi`` and verify them."""
    settings = scheme_settings(scheme, phi, alpha_A, alpha_B, family)
    t_a, t_b = settings.devices()
    return verify_compensation(phi, family, t_a, t_b, chsh, settings_echo=settings)
