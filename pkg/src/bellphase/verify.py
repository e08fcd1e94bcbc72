"""Self-check suites: each compares two independent computations of the same quantity."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .bell import (
    TSIRELSON,
    AnalyzerSettings,
    bell_parameter,
    closed_form_model,
    maximize_bell_numeric,
    optimal_settings_closed,
    outcome_probs,
    rotating_analyzer_probs,
)
from .compensation import Scheme, compensate
from .jones import rotation
from .states import Family, make_state

VERIFY_SEED = 20240521


@dataclass
class SuiteResult:
    name: str
    cases: int
    max_error: float
    tolerance: float
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, max error {self.max_error:.3e} (tol {self.tolerance:.0e})"


def suite_smax(closed_form=optimal_settings_closed, n: int = 50) -> SuiteResult:
    res = SuiteResult("closed-form vs numeric S_max", n, 0.0, 1e-6)
    for phi in np.linspace(0.0, math.pi, n):
        settings, s_closed = closed_form(float(phi))
        s_direct = bell_parameter(closed_form_model(float(phi)), settings)
        s_num = maximize_bell_numeric(float(phi), 1e-10).s
        err = max(abs(s_closed - s_num), abs(s_direct - s_num))
        res.max_error = max(res.max_error, err)
        if err > res.tolerance:
            res.failures.append(f"phi={float(phi)!r} closed={s_closed!r} direct={s_direct!r} numeric={s_num!r}")
    return res


def suite_compensation(n: int = 100, seed: int = VERIFY_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed)
    schemes = list(Scheme)
    families = list(Family)
    res = SuiteResult("scheme end-to-end (phi_eff, S)", n, 0.0, 1e-9)
    for _ in range(n):
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        scheme = schemes[int(rng.integers(len(schemes)))]
        family = families[int(rng.integers(len(families)))]
        rep = compensate(scheme, family, phi)
        err = max(abs(rep.phi_eff), abs(rep.s_at_chsh - TSIRELSON))
        res.max_error = max(res.max_error, err)
        if err > res.tolerance:
            res.failures.append(f"scheme={scheme.value} family={family.value} phi={phi!r} "
                                f"phi_eff={rep.phi_eff!r} S={rep.s_at_chsh!r}")
    return res


def suite_probabilities(n: int = 1000, seed: int = VERIFY_SEED + 1) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("closed-form vs projected probabilities", n, 0.0, 1e-12)
    for phi, a, b in rng.uniform([0.0, -math.pi, -math.pi], [2.0 * math.pi, math.pi, math.pi], size=(n, 3)):
        closed = rotating_analyzer_probs(phi, a, b).as_array()
        proj = outcome_probs(make_state(Family.PHI, phi), rotation(a), rotation(b)).as_array()
        err = float(np.max(np.abs(closed - proj)))
        res.max_error = max(res.max_error, err)
        if err > res.tolerance:
            res.failures.append(f"phi={phi!r} a={a!r} b={b!r} err={err!r}")
    return res


def run_verify(closed_form=optimal_settings_closed, stream=None) -> bool:
    stream = stream or sys.stdout
    suites = [suite_smax(closed_form), suite_compensation(), suite_probabilities()]
    for s in suites:
        print(s.line(), file=stream)
        for f in s.failures:
            print(f"  failing case: {f}", file=stream)
    ok = all(s.ok for s in suites)
    print("verify: all suites passed" if ok else "verify: FAILED", file=stream)
    return ok


def perturbed_closed_form(phi: float, eps: float = 1e-3) -> tuple[AnalyzerSettings, float]:
    """Deliberately wrong S_max, for checking that the harness fails."""
    settings, s = optimal_settings_closed(phi)
    return settings, s * (1.0 + eps)
