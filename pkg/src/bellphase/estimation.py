"""Phase recovery from a scanned coincidence fringe."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import effective_phase_of
from .compensation import Scheme, as_scheme, rotating_scheme_settings
from .errors import IllConditionedError, InvalidArgumentError, LowVisibilityError, PreconditionError
from .jones import wrap_phase, wrap_positive
from .simulate import FringeData

MIN_VISIBILITY = 0.2
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class FringeFit:
    """y = offset + cos_amp*cos(x) + sin_amp*sin(x) = offset + R*cos(x - phase)."""

    offset: float
    cos_amp: float
    sin_amp: float
    phase: float
    visibility: float
    sigma_phase: float
    residual_chi2: float
    n_points: int

    @property
    def amplitude(self) -> float:
        return math.hypot(self.cos_amp, self.sin_amp)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.offset + self.cos_amp * np.cos(x) + self.sin_amp * np.sin(x)


def harmonic_fit(x, y=None) -> FringeFit:
    """Poisson-weighted linear least squares of a first-harmonic fringe.

    Accepts ``harmonic_fit(points)`` with (x, y) pairs or ``harmonic_fit(x, y)``.
    Weights are 1/max(y, 1). ``phase`` is the location of the fringe maximum.
    The covariance is scaled by the reduced chi-square when that exceeds one.
    """
    if y is None:
        pts = np.asarray(list(x), dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidArgumentError("points must be (x, y) pairs")
        x, y = pts[:, 0], pts[:, 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidArgumentError("x and y must be 1-d arrays of equal length")
    n = x.size
    if n < 4:
        raise PreconditionError(f"harmonic fit needs at least 4 points, got {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidArgumentError("non-finite fit input")

    design = np.column_stack([np.ones(n), np.cos(x), np.sin(x)])
    w = 1.0 / np.maximum(y, 1.0)
    normal = design.T @ (w[:, None] * design)
    cond = np.linalg.cond(normal)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(f"degenerate scan placement (condition number {cond:.3g})")
    coef = np.linalg.solve(normal, design.T @ (w * y))
    cov = np.linalg.inv(normal)
    m, a, b = (float(c) for c in coef)

    resid = y - design @ coef
    chi2 = float(np.sum(w * resid ** 2) / (n - 3))
    # weights from observed counts understate the scatter slightly; never shrink below it
    cov = cov * max(chi2, 1.0)

    r2 = a * a + b * b
    amp = math.sqrt(r2)
    phase = math.atan2(b, a)
    if r2 > 0.0:
        grad = np.array([0.0, -b / r2, a / r2])
        sigma = float(math.sqrt(max(grad @ cov @ grad, 0.0)))
    else:
        sigma = math.inf
    vis = amp / m if m > 0.0 else 0.0
    return FringeFit(m, a, b, phase, vis, sigma, chi2, n)


@dataclass(frozen=True)
class PhaseEstimate:
    """Recovered state phase.

    ``setpoint`` is the scanned knob value that cancels the phase (coincidence
    maximum); ``alt_setpoint`` the one giving effective phase pi (coincidence
    minimum), available for the linear-knob schemes.
    """

    phi_hat: float
    sigma: float
    scheme: Scheme
    fit: FringeFit
    setpoint: float | None = None
    alt_setpoint: float | None = None


def analyzer_offsets(data: FringeData) -> np.ndarray:
    """Effective phase minus state phase at every scan point, from the device matrices."""
    return np.array([effective_phase_of(data.family, 0.0, *data.spec.devices(x)) for x in data.scan_values])


def estimate_phase(scheme, data: FringeData, *, use_expected: bool = False,
                   min_visibility: float = MIN_VISIBILITY) -> PhaseEstimate:
    """Fit the ++ coincidences against the analyser phase offset and invert.

    In the diagonal configuration P++ = (1 + cos(phi + offset))/4, so the fitted
    fringe peaks at offset = -phi. Offsets come from the actual device matrices
    at each scan value (for ROTATING this is the nonlinear chi_A -> phi_A map).
    """
    scheme = as_scheme(scheme)
    if scheme is not data.scheme:
        raise InvalidArgumentError(f"data was scanned with {data.scheme.value}, not {scheme.value}")
    offsets = analyzer_offsets(data)
    y = data.expected("pp") if use_expected else data.counts("pp")
    fit = harmonic_fit(offsets, y)
    phi_hat = wrap_phase(-fit.phase)

    setpoint = alt = None
    if scheme is Scheme.ROTATING:
        setpoint = rotating_scheme_settings(phi_hat, math.pi / 4, math.pi / 4, data.family).chi_A
    else:
        # offset falls by exactly one radian per radian of knob travel
        x0 = float(data.scan_values[0])
        setpoint = wrap_positive(x0 + offsets[0] + phi_hat)
        alt = wrap_positive(setpoint + math.pi)
    est = PhaseEstimate(phi_hat, fit.sigma_phase, scheme, fit, setpoint, alt)
    if not fit.visibility >= min_visibility:
        raise LowVisibilityError(
            f"fringe visibility {fit.visibility:.3g} below {min_visibility}; estimate unreliable", est
        )
    return est
