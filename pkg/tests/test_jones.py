import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellphase.errors import InvalidArgumentError, PreconditionError
from bellphase.jones import (
    Element,
    WaveplateParams,
    chain,
    compose,
    decompose,
    named_element,
    rotation,
    waveplate,
    wrap_phase,
    wrap_positive,
)

angles = st.floats(-10.0, 10.0, allow_nan=False)
I2 = np.eye(2)


def test_zero_retardation_is_identity():
    for zeta in (0.0, 0.3, -2.0, math.pi):
        np.testing.assert_allclose(waveplate(zeta, 0.0), I2, atol=1e-15)


def test_quarter_wave_at_45():
    c = math.cos(math.pi / 4)
    want = np.array([[c, -1j * c], [-1j * c, c]])
    np.testing.assert_allclose(waveplate(math.pi / 4, math.pi / 2), want, atol=1e-15)


def test_plate_at_zero_is_diagonal():
    chi = 0.77
    want = np.diag([cmath.exp(-0.5j * chi), cmath.exp(0.5j * chi)])
    np.testing.assert_allclose(waveplate(0.0, chi), want, atol=1e-15)


def test_named_elements():
    np.testing.assert_allclose(named_element(Element.HALF_WAVE, 0.0), -1j * np.diag([1, -1]), atol=1e-15)
    np.testing.assert_allclose(named_element(Element.COMP_AT_45, math.pi), [[0, -1j], [-1j, 0]], atol=1e-15)
    np.testing.assert_allclose(named_element(Element.COMP_AT_0, 0.0), I2, atol=1e-15)
    np.testing.assert_allclose(named_element("quarter_wave", 0.2), waveplate(0.2, math.pi / 2), atol=1e-15)


def test_named_element_rejects_unknown_kind():
    with pytest.raises(InvalidArgumentError):
        named_element("full_wave", 0.0)


def test_nonfinite_inputs_rejected():
    with pytest.raises(InvalidArgumentError):
        waveplate(math.nan, 1.0)
    with pytest.raises(InvalidArgumentError):
        rotation(math.inf)


def test_compose_order():
    j = waveplate(0.3, 1.1)
    np.testing.assert_allclose(compose(I2, j), j, atol=1e-15)
    np.testing.assert_allclose(compose(j, j.conj().T), I2, atol=1e-15)
    c1, c2 = 0.9, 2.2
    m = compose(named_element(Element.COMP_AT_0, c1), named_element(Element.COMP_AT_45, c2))
    row = [math.cos(c2 / 2) * cmath.exp(-0.5j * c1), -1j * math.sin(c2 / 2) * cmath.exp(0.5j * c1)]
    np.testing.assert_allclose(m[0], row, atol=1e-15)


def test_chain_matches_nested_compose():
    a, b, c = waveplate(0.1, 0.5), waveplate(-0.4, 2.0), rotation(0.7)
    np.testing.assert_allclose(chain(a, b, c), compose(compose(a, b), c), atol=1e-15)


def test_decompose_comp_at_45():
    chi = 1.3
    d = decompose(named_element(Element.COMP_AT_45, chi))
    assert d.alpha == pytest.approx(chi / 2, abs=1e-12)
    assert d.phi == pytest.approx(0.0, abs=1e-12)
    assert d.phi_prime == pytest.approx(-math.pi / 2, abs=1e-12)


def test_decompose_identity_reports_zero_phases():
    d = decompose(I2)
    assert (d.alpha, d.phi, d.phi_prime) == (0.0, 0.0, 0.0)


def test_decompose_fixed_pair_chain():
    c1, c2 = 0.6, 1.4
    d = decompose(compose(named_element(Element.COMP_AT_0, c1), named_element(Element.COMP_AT_45, c2)))
    assert d.alpha == pytest.approx(c2 / 2, abs=1e-12)
    assert d.phi == pytest.approx(-c1 / 2, abs=1e-12)
    assert d.phi_prime == pytest.approx(c1 / 2 - math.pi / 2, abs=1e-12)


def test_decompose_rejects_non_unitary():
    with pytest.raises(PreconditionError):
        decompose(np.array([[1, 0], [0, 2]]))


@settings(max_examples=200, deadline=None)
@given(angles, angles, angles)
def test_decompose_reconstructs(zeta, chi, theta):
    m = compose(waveplate(zeta, chi), rotation(theta))
    d = decompose(m)
    np.testing.assert_allclose(d.matrix(), m, atol=1e-12)
    assert 0.0 <= d.alpha <= math.pi / 2


@settings(max_examples=200, deadline=None)
@given(angles, angles)
def test_waveplate_is_unitary(zeta, chi):
    m = waveplate(zeta, chi)
    np.testing.assert_allclose(m @ m.conj().T, I2, atol=1e-14)
    assert abs(np.linalg.det(m) - 1) < 1e-14


@settings(max_examples=100, deadline=None)
@given(angles, angles)
def test_waveplate_params_canonical_up_to_global_phase(zeta, chi):
    p = WaveplateParams(zeta, chi)
    c = p.canonical()
    assert -math.pi / 4 <= c.zeta <= math.pi / 4 and -math.pi <= c.chi <= math.pi
    m, mc = p.matrix(), c.matrix()
    ratio = np.vdot(mc.ravel(), m.ravel()) / 2
    assert abs(abs(ratio) - 1) < 1e-12
    np.testing.assert_allclose(mc * ratio, m, atol=1e-12)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_wrap_ranges(x):
    w = wrap_phase(x)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-9)
    p = wrap_positive(x)
    assert 0.0 <= p < 2 * math.pi
