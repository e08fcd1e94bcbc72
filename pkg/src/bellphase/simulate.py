"""Seeded Monte-Carlo coincidence counts and compensator-scan fringes."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .bell import OutcomeProbs, outcome_probs
from .compensation import (
    ExperimentalSettings,
    FixedPairSettings,
    RotatingCompSettings,
    Scheme,
    as_scheme,
    experimental_chain,
    rotating_scheme_diagonal_scan,
)
from .errors import DomainError, InvalidArgumentError, RangeError
from .states import Family, as_family, make_state

MAX_MEAN = 2.0 ** 53
OUTCOMES = ("pp", "pm", "mp", "mm")


@dataclass(frozen=True)
class SourceModel:
    """Detected pair rate and background, both per second; ``seed`` is 64-bit unsigned."""

    pair_rate: float = 1000.0
    integration_time: float = 1.0
    accidental_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("pair_rate", "integration_time", "accidental_rate"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidArgumentError(f"{name} must be finite")
        if self.pair_rate < 0 or self.accidental_rate < 0:
            raise InvalidArgumentError("rates must be non-negative")
        if self.integration_time <= 0:
            raise InvalidArgumentError("integration_time must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class CountRecord:
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    def as_array(self) -> np.ndarray:
        return np.array([self.n_pp, self.n_pm, self.n_mp, self.n_mm])


def expected_counts(p: OutcomeProbs, m: SourceModel) -> np.ndarray:
    means = m.pair_rate * m.integration_time * p.as_array() + m.accidental_rate * m.integration_time / 4.0
    if np.any(means > MAX_MEAN):
        raise RangeError(f"expected count {means.max():.3g} exceeds 2^53")
    return means


def simulate_counts(p: OutcomeProbs, m: SourceModel, seed: int | None = None) -> CountRecord:
    """Independent Poisson counts for the four outcomes, reproducible from the seed."""
    means = expected_counts(p, m)
    draws = kernels.poisson_draws(means, m.seed if seed is None else seed)
    return CountRecord(*(int(n) for n in draws))


@dataclass(frozen=True)
class ScanSpec:
    """Which knob is scanned, with every other knob in the diagonal configuration.

    ROTATING scans chi_A over [pi/2, 3pi/2] with zeta_A tracking alpha_A = pi/4;
    FIXED_PAIR scans chi_1A with chi_2A = chi_B = pi/2; EXPERIMENTAL scans the
    compensator retardation chi_2A with the half-wave plates at zeta_1A, zeta_B.
    """

    scheme: Scheme
    zeta_1A: float = math.pi / 8
    zeta_B: float = math.pi / 8

    def __post_init__(self):
        object.__setattr__(self, "scheme", as_scheme(self.scheme))

    def devices(self, x: float):
        if self.scheme is Scheme.ROTATING:
            zeta, _ = rotating_scheme_diagonal_scan(x)
            return RotatingCompSettings(x, zeta, math.pi / 2).devices()
        if self.scheme is Scheme.FIXED_PAIR:
            return FixedPairSettings(x, math.pi / 2, math.pi / 2).devices()
        return experimental_chain(ExperimentalSettings(self.zeta_1A, x, self.zeta_B))

    def echo(self) -> dict:
        out = {"scheme": self.scheme.value}
        if self.scheme is Scheme.EXPERIMENTAL:
            out.update(zeta_1A=self.zeta_1A, zeta_B=self.zeta_B)
        elif self.scheme is Scheme.FIXED_PAIR:
            out.update(chi_2A=math.pi / 2, chi_B=math.pi / 2)
        else:
            out.update(alpha_A=math.pi / 4, chi_B=math.pi / 2)
        return out


@dataclass(frozen=True)
class FringePoint:
    scan_value: float
    counts: CountRecord
    expected: tuple
    p_model: float


@dataclass(frozen=True)
class FringeData:
    points: tuple
    spec: ScanSpec
    family: Family
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        xs = [p.scan_value for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidArgumentError("scan values must be strictly increasing")

    @property
    def scheme(self) -> Scheme:
        return self.spec.scheme

    @property
    def scan_values(self) -> np.ndarray:
        return np.array([p.scan_value for p in self.points])

    def counts(self, outcome: str = "pp") -> np.ndarray:
        i = OUTCOMES.index(outcome)
        return np.array([p.counts.as_array()[i] for p in self.points], dtype=float)

    def expected(self, outcome: str = "pp") -> np.ndarray:
        i = OUTCOMES.index(outcome)
        return np.array([p.expected[i] for p in self.points])


def scan_fringe(family, phi_true: float, scheme, grid, m: SourceModel) -> FringeData:
    """Scan one knob of ``scheme`` over ``grid`` and simulate the counts at each point.

    ``scheme`` is a :class:`ScanSpec` or a scheme name (diagonal defaults).
    Point ``i`` draws from seed ``m.seed XOR mix64((i + 1) * golden)``.
    """
    family = as_family(family)
    spec = scheme if isinstance(scheme, ScanSpec) else ScanSpec(as_scheme(scheme))
    grid = [float(x) for x in grid]
    if spec.scheme is Scheme.ROTATING:
        bad = [x for x in grid if not (math.pi / 2 - 1e-12 <= x <= 1.5 * math.pi + 1e-12)]
        if bad:
            raise DomainError(f"rotating scan needs chi_A in [pi/2, 3*pi/2]; got {bad[0]!r}")
    state = make_state(family, phi_true)
    points = []
    for i, x in enumerate(grid):
        t_a, t_b = spec.devices(x)
        p = outcome_probs(state, t_a, t_b)
        means = expected_counts(p, m)
        counts = CountRecord(*(int(n) for n in kernels.poisson_draws(means, kernels.point_seed(m.seed, i))))
        points.append(FringePoint(x, counts, tuple(float(v) for v in means), p.p_pp))
    settings = spec.echo() | {"phi_true": phi_true, "source": asdict(m)}
    return FringeData(tuple(points), spec, family, settings)
