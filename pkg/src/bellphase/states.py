"""Two-photon polarization states in the fixed basis order (HH, HV, VH, VV)."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, PreconditionError
from .jones import require_unitary

SQRT1_2 = 1.0 / math.sqrt(2.0)

BASIS = ("HH", "HV", "VH", "VV")

# swaps H and V on channel B; maps |Psi(phi)> onto |Phi(phi)>
SWAP_HV = np.array([[0, 1], [1, 0]], dtype=complex)


class Family(enum.Enum):
    PHI = "phi"
    PSI = "psi"


def as_family(value) -> Family:
    if isinstance(value, Family):
        return value
    try:
        return Family(str(value).lower())
    except ValueError:
        raise InvalidArgumentError(f"unknown state family {value!r}; expected PHI or PSI") from None


def make_state(family, phi: float) -> np.ndarray:
    """Maximally entangled state (|HH> + e^{i phi}|VV>)/sqrt2 or (|HV> + e^{i phi}|VH>)/sqrt2."""
    family = as_family(family)
    if not math.isfinite(phi):
        raise InvalidArgumentError(f"phi must be finite, got {phi!r}")
    psi = np.zeros(4, dtype=complex)
    tail = cmath.exp(1j * phi) * SQRT1_2
    if family is Family.PHI:
        psi[0], psi[3] = SQRT1_2, tail
    else:
        psi[1], psi[2] = SQRT1_2, tail
    return psi


def as_state(state, tol: float = 1e-12) -> np.ndarray:
    s = np.asarray(state, dtype=complex).reshape(-1)
    if s.shape != (4,):
        raise InvalidArgumentError(f"a two-qubit state has 4 amplitudes, got {s.shape}")
    norm = float(np.vdot(s, s).real)
    if abs(norm - 1.0) > tol:
        raise PreconditionError(f"state is not normalised (|psi|^2 = {norm!r})")
    return s


@dataclass(frozen=True)
class BellCoefficients:
    c_plus: complex
    c_minus: complex


def bell_coefficients(state) -> BellCoefficients:
    """Amplitudes on |Phi+> and |Phi-> of a state supported on HH and VV."""
    s = as_state(state)
    if abs(s[1]) > 1e-10 or abs(s[2]) > 1e-10:
        raise PreconditionError("state has HV/VH support; Bell coefficients need HH/VV only")
    return BellCoefficients(complex((s[0] + s[3]) * SQRT1_2), complex((s[0] - s[3]) * SQRT1_2))


def apply_local(state, u_a, u_b) -> np.ndarray:
    """Re-express ``state`` in the analysis bases defined by the rows of ``u_a`` and ``u_b``.

    Component (i, j) of the result is <row_i(u_a), row_j(u_b) | state>, i.e. the
    amplitudes transform with conj(u_a) (x) conj(u_b). Squared moduli of the
    result are the outcome probabilities of analysers ``u_a`` and ``u_b``.
    """
    s = as_state(state)
    a = require_unitary(u_a, "U_A")
    b = require_unitary(u_b, "U_B")
    return np.kron(a.conj(), b.conj()) @ s


def global_phase_equal(s1, s2, tol: float = 1e-12) -> bool:
    """True when the two vectors agree up to a global phase."""
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    overlap = np.vdot(s1, s2)
    if abs(overlap) < 1e-300:
        return bool(np.allclose(s1, s2, atol=tol, rtol=0))
    return bool(np.max(np.abs(s1 * (overlap / abs(overlap)) - s2)) <= tol)
