import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellphase.bell import (
    STANDARD_SETTINGS,
    TSIRELSON,
    AnalyzerSettings,
    EffectivePhaseInputs,
    OutcomeProbs,
    bell_parameter,
    closed_form_model,
    correlation,
    effective_phase,
    effective_phase_of,
    maximize_bell_numeric,
    optimal_settings_closed,
    outcome_probs,
    reduce_phase,
    rotating_analyzer_model,
    rotating_analyzer_probs,
)
from bellphase.errors import DegenerateAnalyzerError, InvalidArgumentError, PreconditionError
from bellphase.jones import Element, UnitaryDecomposition, compose, named_element, rotation
from bellphase.states import Family, make_state

angle = st.floats(-20.0, 20.0, allow_nan=False)


def test_outcome_probs_examples():
    p = outcome_probs(make_state(Family.PHI, 0.0), rotation(0.0), rotation(0.0))
    np.testing.assert_allclose(p.as_array(), [0.5, 0, 0, 0.5], atol=1e-15)
    p = outcome_probs(make_state(Family.PHI, math.pi / 2), rotation(math.pi / 4), rotation(math.pi / 4))
    np.testing.assert_allclose(p.as_array(), [0.25] * 4, atol=1e-15)
    p = outcome_probs(make_state(Family.PHI, 0.0), rotation(0.0), rotation(math.pi / 8))
    assert p.p_pp == pytest.approx(0.5 * math.cos(math.pi / 8) ** 2, abs=1e-15)
    assert p.p_pp == pytest.approx(0.426777, abs=1e-6)


def test_outcome_probs_rejects_non_unitary():
    with pytest.raises(PreconditionError):
        outcome_probs(make_state(Family.PHI, 0.0), 1.5 * np.eye(2), np.eye(2))


def test_rotating_analyzer_examples():
    assert rotating_analyzer_probs(0.0, 0.0, 0.0).p_pp == 0.5
    assert rotating_analyzer_probs(math.pi, 0.0, 0.0).p_pp == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(angle, angle, angle)
def test_symmetry_on_arbitrary_floats(phi, a, b):
    # phi + pi is rounded for general floats, so equality holds to rounding only
    p1 = rotating_analyzer_probs(phi, a, b).as_array()
    p2 = rotating_analyzer_probs(phi + math.pi, a, -b).as_array()
    np.testing.assert_allclose(p1, p2, atol=1e-14)


@settings(max_examples=300, deadline=None)
@given(angle, angle, angle)
def test_closed_form_matches_projection(phi, a, b):
    closed = rotating_analyzer_probs(phi, a, b).as_array()
    proj = outcome_probs(make_state(Family.PHI, phi), rotation(a), rotation(b)).as_array()
    np.testing.assert_allclose(closed, proj, atol=1e-12)
    assert math.fsum(closed) == pytest.approx(1.0, abs=1e-15)


def test_reduce_phase():
    assert reduce_phase(0.0) == (0.0, False)
    r, flip = reduce_phase(-0.5)
    assert r == pytest.approx(math.pi - 0.5) and flip
    with pytest.raises(InvalidArgumentError):
        reduce_phase(math.inf)


def test_correlation_examples():
    assert correlation(OutcomeProbs(0.5, 0, 0, 0.5)) == 1
    assert correlation(OutcomeProbs(0.25, 0.25, 0.25, 0.25)) == 0
    e = correlation(rotating_analyzer_probs(0.0, 0.0, math.pi / 8))
    assert e == pytest.approx(math.cos(math.pi / 4), abs=1e-15)


def test_outcome_probs_validation():
    with pytest.raises(PreconditionError):
        OutcomeProbs(0.5, 0.5, 0.5, 0.0)
    with pytest.raises(InvalidArgumentError):
        OutcomeProbs(math.nan, 0, 0, 1)


def test_bell_parameter_examples():
    assert bell_parameter(closed_form_model(0.0), STANDARD_SETTINGS) == pytest.approx(TSIRELSON, abs=1e-15)
    s_half, _ = optimal_settings_closed(math.pi / 2)
    assert bell_parameter(closed_form_model(math.pi / 2), s_half) == pytest.approx(2.0, abs=1e-15)
    assert bell_parameter(closed_form_model(0.0), AnalyzerSettings(0, 0, 0, 0)) == pytest.approx(2.0, abs=1e-15)


def test_matrix_model_agrees_with_closed_model():
    s = AnalyzerSettings(0.1, 0.9, -0.3, 0.4)
    phi = 0.77
    assert bell_parameter(rotating_analyzer_model(make_state(Family.PHI, phi)), s) == pytest.approx(
        bell_parameter(closed_form_model(phi), s), abs=1e-14)


def test_analyzer_settings_canonical_mod_pi():
    s = AnalyzerSettings(math.pi, 3 * math.pi / 4, -math.pi / 2, 0.1 + math.pi)
    assert s.a == pytest.approx(0.0, abs=1e-15)
    assert s.a_prime == pytest.approx(-math.pi / 4)
    assert s.b == pytest.approx(math.pi / 2)
    assert s.b_prime == pytest.approx(0.1)


def test_optimal_settings_examples():
    s, smax = optimal_settings_closed(0.0)
    np.testing.assert_allclose(s.as_tuple(), STANDARD_SETTINGS.as_tuple(), atol=1e-15)
    assert smax == pytest.approx(TSIRELSON)
    s, smax = optimal_settings_closed(math.pi / 2)
    np.testing.assert_allclose(s.as_tuple(), (0, math.pi / 4, 0, 0), atol=1e-15)
    assert smax == pytest.approx(2.0)
    s, smax = optimal_settings_closed(math.pi / 3)
    assert s.b == pytest.approx(0.2318238, abs=1e-7)
    assert smax == pytest.approx(2.2360680, abs=1e-7)


@pytest.mark.parametrize("phi,want", [(0.0, TSIRELSON), (math.pi / 2, 2.0), (math.pi / 3, math.sqrt(5.0))])
def test_numeric_maximum(phi, want):
    opt = maximize_bell_numeric(phi)
    assert opt.s == pytest.approx(want, abs=1e-9)
    assert bell_parameter(closed_form_model(phi), opt.settings) == pytest.approx(opt.s, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-10.0, 10.0))
def test_numeric_maximum_outside_base_range(phi):
    opt = maximize_bell_numeric(phi)
    assert opt.s == pytest.approx(2.0 * math.sqrt(math.cos(phi) ** 2 + 1), abs=1e-9)
    assert bell_parameter(closed_form_model(phi), opt.settings) == pytest.approx(opt.s, abs=1e-12)


def test_numeric_rejects_bad_tol():
    with pytest.raises(InvalidArgumentError):
        maximize_bell_numeric(0.0, tol=0.0)


def test_effective_phase_direct_sum():
    q = math.pi / 4
    inp = EffectivePhaseInputs(1.0, UnitaryDecomposition(q, 0.5, -math.pi / 2),
                               UnitaryDecomposition(q, 0.0, -math.pi / 2))
    assert effective_phase(inp) == pytest.approx(1.5 - math.pi, abs=1e-15)


def test_effective_phase_fixed_pair_chain():
    phi, c1 = 0.4, 2.1
    t_a = compose(named_element(Element.COMP_AT_0, c1), named_element(Element.COMP_AT_45, math.pi / 2))
    t_b = named_element(Element.COMP_AT_45, math.pi / 2)
    got = effective_phase_of(Family.PHI, phi, t_a, t_b)
    assert got == pytest.approx(phi - c1 + math.pi, abs=1e-12)


def test_effective_phase_degenerate():
    with pytest.raises(DegenerateAnalyzerError):
        effective_phase_of(Family.PHI, 0.0, np.eye(2), np.eye(2))
