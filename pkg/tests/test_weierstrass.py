"""Split representation of timelike minimal surfaces and its quadrature."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adscmc.config import DEFAULT_TOL
from adscmc.geometry import fundamental_data
from adscmc.weierstrass import (QuadratureError, WeierstrassData,
                                adaptive_quadrature, integrate_minimal,
                                minimal_metric_factor, minimal_normal,
                                projected_gauss_minimal,
                                weierstrass_derivatives)

ENNEPER = WeierstrassData.build("u", "1", "v", "1")

small = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False)


def test_derivative_directions_at_reference_values():
    # q = 0, f = 1 leaves the bare u-direction (1/2, -1/2, 0)
    data = WeierstrassData.build("0", "1", "0", "1")
    psi_u, psi_v = weierstrass_derivatives(data, 0.7, -0.3)
    assert np.allclose(psi_u, [0.5, -0.5, 0.0], atol=1e-14)
    assert np.allclose(psi_v, [-0.5, -0.5, 0.0], atol=1e-14)


def test_derivative_directions_scale_with_density():
    data = WeierstrassData.build("1", "2", "1", "2")
    psi_u, psi_v = weierstrass_derivatives(data, 0.0, 0.0)
    assert np.allclose(psi_u, [2.0, 0.0, -2.0], atol=1e-14)
    assert np.allclose(psi_v, [-2.0, 0.0, -2.0], atol=1e-14)


@given(small, small)
@settings(max_examples=80)
def test_metric_factor_identity(u, v):
    # the quoted conformal factor equals twice the mixed product of the
    # two null directions, exactly, not merely to truncation error
    psi_u, psi_v = weierstrass_derivatives(ENNEPER, u, v)
    pairing = 2.0 * (-psi_u[0] * psi_v[0] + psi_u[1] * psi_v[1] + psi_u[2] * psi_v[2])
    factor = minimal_metric_factor(ENNEPER, u, v)
    assert abs(pairing - factor) < 1e-10 * (1.0 + abs(factor))


def test_metric_factor_closed_form():
    val = minimal_metric_factor(ENNEPER, 0.4, 0.7)
    assert np.isclose(val, (1 + 0.4 * 0.7) ** 2, atol=1e-13)


def test_surface_matches_hand_antiderivatives():
    dom = (-0.6, 0.6, -0.6, 0.6)
    surf = integrate_minimal(ENNEPER, dom, 41, 41)
    us = surf.us[:, None]
    vs = surf.vs[None, :]

    def a_leg(u):
        return np.stack([u / 2 + u ** 3 / 6, -u / 2 + u ** 3 / 6, -u ** 2 / 2], axis=-1)

    def b_leg(v):
        return np.stack([-v / 2 - v ** 3 / 6, -v / 2 + v ** 3 / 6, -v ** 2 / 2], axis=-1)

    want = a_leg(us) + b_leg(vs) - a_leg(np.array([[dom[0]]])) - b_leg(np.array([[dom[2]]]))
    assert np.max(np.abs(surf.points - want)) < 1e-12


def test_integrated_surface_is_minimal_and_null():
    surf = integrate_minimal(ENNEPER, (-0.6, 0.6, -0.6, 0.6), 81, 81)
    fd = fundamental_data(surf)
    assert np.nanmax(np.abs(fd.H)) < 5e-5
    assert np.nanmax(fd.conf_u) < 1e-3
    assert np.nanmax(fd.conf_v) < 1e-3


def test_projected_gauss_recovers_data():
    us = np.linspace(-0.5, 0.5, 11)
    vs = np.linspace(-0.5, 0.5, 11)
    g1, g2 = projected_gauss_minimal(ENNEPER, us[:, None], vs[None, :])
    assert np.max(np.abs(g1 - us[:, None])) < 1e-12
    assert np.max(np.abs(g2 - vs[None, :])) < 1e-12


def test_measured_normal_matches_exact_normal():
    surf = integrate_minimal(ENNEPER, (-0.5, 0.5, -0.5, 0.5), 101, 101)
    fd = fundamental_data(surf)
    exact = minimal_normal(ENNEPER, surf.us[:, None], surf.vs[None, :])
    core = ~np.isnan(fd.normal[..., 0])
    # agreement is limited by the second-order differencing of the grid
    assert np.max(np.abs(fd.normal - exact)[core]) < 2e-4


def test_projected_gauss_pole_raises():
    # a huge q r drives the normal onto the chart pole
    data = WeierstrassData.build("200000", "1", "200000", "1")
    with pytest.raises(ZeroDivisionError):
        projected_gauss_minimal(data, 0.0, 0.0)


def test_degenerate_points_are_masked():
    surf = integrate_minimal(ENNEPER, (-1.5, -0.5, 0.5, 1.5), 11, 11)
    # u = -1, v = 1 sits on the grid and annihilates (1 + uv)^2
    assert surf.mask[5, 5]
    assert not surf.mask[0, 0]
    assert surf.mask.sum() < surf.mask.size


def test_quadrature_value():
    val = adaptive_quadrature(np.sin, 0.0, 1.0)
    assert abs(val - (1.0 - np.cos(1.0))) < 1e-13


@given(st.floats(min_value=-2.0, max_value=0.0, allow_nan=False),
       st.floats(min_value=0.5, max_value=2.0, allow_nan=False))
@settings(max_examples=40)
def test_quadrature_is_exact_on_polynomials(a, b):
    val = adaptive_quadrature(lambda t: t ** 6, a, b)
    want = (b ** 7 - a ** 7) / 7.0
    assert abs(val - want) < 1e-11 * (1.0 + abs(want))


def test_quadrature_failure_names_the_interval():
    def pole(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / t

    with pytest.raises(QuadratureError, match=r"\["):
        adaptive_quadrature(pole, -1.0, 1.0, max_depth=12)


def test_build_coerces_strings_and_numbers():
    data = WeierstrassData.build("u^2", 2.0, "0", "1")
    assert np.isclose(data.q(3.0), 9.0)
    assert np.isclose(data.f(123.0), 2.0)
