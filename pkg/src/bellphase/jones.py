"""Jones matrices of retarders, their composition and SU(2) decomposition.

A Jones matrix here is a plain ``(2, 2)`` complex ndarray. Its rows define the
analysis basis of a channel: the first row is the ``+`` outcome, the second
row the ``-`` outcome, both in the ``(H, V)`` basis.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, PreconditionError

UNITARY_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)


class Element(enum.Enum):
    HALF_WAVE = "half_wave"
    QUARTER_WAVE = "quarter_wave"
    COMP_AT_45 = "comp_at_45"
    COMP_AT_0 = "comp_at_0"


def wrap_phase(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    return y


def wrap_positive(x: float, period: float = 2.0 * math.pi) -> float:
    """Reduce an angle to [0, period)."""
    y = math.fmod(x, period)
    if y < 0.0:
        y += period
    if y >= period:
        y = 0.0
    return y


def _finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgumentError(f"expected a finite real number, got {v!r}")


def as_jones(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (2, 2):
        raise InvalidArgumentError(f"{name} must be 2x2, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    return a


def unitarity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - IDENTITY)))


def require_unitary(m, name: str = "matrix", tol: float = UNITARY_TOL) -> np.ndarray:
    a = as_jones(m, name)
    err = unitarity_defect(a)
    if err > tol:
        raise PreconditionError(f"{name} is not unitary (max |U^H U - I| = {err:.3g})")
    return a


def is_unitary(m, tol: float = 1e-12) -> bool:
    return unitarity_defect(np.asarray(m, dtype=complex)) <= tol


@dataclass(frozen=True)
class WaveplateParams:
    """Rotation ``zeta`` and retardation ``chi`` of a linear retarder (radians)."""

    zeta: float
    chi: float

    def __post_init__(self):
        _finite(self.zeta, self.chi)

    def canonical(self) -> "WaveplateParams":
        """Equivalent parameters with zeta in [-pi/4, pi/4] and chi in [-pi, pi].

        Rotating a plate by pi/2 swaps its fast and slow axes (chi -> -chi) and a
        2*pi retardation step only flips the global sign, so the returned plate
        equals the original up to a global phase.
        """
        zeta = math.remainder(self.zeta, math.pi)
        chi = self.chi
        if zeta > math.pi / 4:
            zeta -= math.pi / 2
            chi = -chi
        elif zeta < -math.pi / 4:
            zeta += math.pi / 2
            chi = -chi
        return WaveplateParams(zeta, math.remainder(chi, 2.0 * math.pi))

    def matrix(self) -> np.ndarray:
        return waveplate(self.zeta, self.chi)


def rotation(theta: float) -> np.ndarray:
    """The real rotation R(theta) mapping (H, V) to an analyzer basis at angle theta."""
    _finite(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def waveplate(zeta: float, chi: float) -> np.ndarray:
    """R(zeta)^-1 . P(chi) . R(zeta) for a retarder at angle zeta with retardation chi."""
    _finite(zeta, chi)
    r = rotation(zeta)
    p = np.diag([cmath.exp(-0.5j * chi), cmath.exp(0.5j * chi)])
    return r.T @ p @ r


def named_element(kind: Element | str, param: float) -> np.ndarray:
    """Closed-form matrices of the four standard elements.

    ``param`` is the plate angle for the wave plates and the retardation for
    the compensators fixed at 0 or pi/4. The ``-i`` prefactors of the wave
    plates are kept.
    """
    try:
        kind = Element(kind) if not isinstance(kind, Element) else kind
    except ValueError:
        raise InvalidArgumentError(f"unknown element kind {kind!r}") from None
    _finite(param)
    if kind is Element.HALF_WAVE:
        c, s = math.cos(2 * param), math.sin(2 * param)
        return -1j * np.array([[c, s], [s, -c]], dtype=complex)
    if kind is Element.QUARTER_WAVE:
        c, s = math.cos(2 * param), math.sin(2 * param)
        return (-1j / math.sqrt(2.0)) * np.array([[c + 1j, s], [s, 1j - c]], dtype=complex)
    if kind is Element.COMP_AT_45:
        c, s = math.cos(param / 2), math.sin(param / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    return np.diag([cmath.exp(-0.5j * param), cmath.exp(0.5j * param)])


def compose(first, then) -> np.ndarray:
    """Chain two devices in propagation order: returns ``then @ first``."""
    a = require_unitary(first, "first")
    b = require_unitary(then, "then")
    return b @ a


def chain(*devices) -> np.ndarray:
    """Compose any number of devices given in propagation order."""
    out = IDENTITY.copy()
    for d in devices:
        out = compose(out, d)
    return out


@dataclass(frozen=True)
class UnitaryDecomposition:
    """``J = exp(i*global_phase) * [[h, v], [-v*, h*]]`` with
    ``h = cos(alpha) exp(i*phi)`` and ``v = sin(alpha) exp(i*phi_prime)``."""

    alpha: float
    phi: float
    phi_prime: float
    global_phase: float = 0.0

    @property
    def h(self) -> complex:
        return math.cos(self.alpha) * cmath.exp(1j * self.phi)

    @property
    def v(self) -> complex:
        return math.sin(self.alpha) * cmath.exp(1j * self.phi_prime)

    def matrix(self) -> np.ndarray:
        h, v = self.h, self.v
        su2 = np.array([[h, v], [-v.conjugate(), h.conjugate()]], dtype=complex)
        return cmath.exp(1j * self.global_phase) * su2

    def with_alpha(self, alpha: float) -> "UnitaryDecomposition":
        """Same phases, new analysis angle (negative alpha allowed)."""
        return UnitaryDecomposition(alpha, self.phi, self.phi_prime, self.global_phase)


def decompose(m) -> UnitaryDecomposition:
    """Split a unitary into its (alpha, phi, phi_prime) parameters and global phase.

    The SU(2) representative is fixed by dividing by sqrt(det) and then by the
    sign that puts arg(J11) in (-pi/2, pi/2] (arg(J12) when J11 vanishes).
    """
    j = require_unitary(m, "J")
    half_det = 0.5 * cmath.phase(np.linalg.det(j))
    su = j * cmath.exp(-1j * half_det)
    h, v = complex(su[0, 0]), complex(su[0, 1])
    lead = h if abs(h) > 1e-14 else v
    arg = cmath.phase(lead)
    if arg > math.pi / 2 or arg <= -math.pi / 2:
        h, v = -h, -v
        half_det += math.pi
    alpha = math.atan2(abs(v), abs(h))
    phi = cmath.phase(h) if abs(h) > 1e-14 else 0.0
    phi_prime = cmath.phase(v) if abs(v) > 1e-14 else 0.0
    return UnitaryDecomposition(alpha, wrap_phase(phi), wrap_phase(phi_prime), wrap_phase(half_det))
