import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkdv import pde
from gkdv.errors import HypothesisViolated, InsufficientTail
from gkdv.travelwave import (WaveContext, WaveProfile, big_F, check_well, decay_rate, first_order_rhs,
                             h_fun, homoclinic_profile, integral_inversion_z, potential, wave_speed)


@pytest.fixture(scope="module")
def kdv_profile():
    return homoclinic_profile("u", 3.0)


def test_big_F_examples():
    assert big_F("u", 2) == pytest.approx(2, abs=1e-12)
    assert big_F("1", -3) == pytest.approx(-3, abs=1e-12)
    assert big_F("u^2", 3) == pytest.approx(9, abs=1e-12)


def test_h_examples():
    assert h_fun("u", 3) == pytest.approx(0.5, abs=1e-13)
    assert h_fun("u^2", 2) == pytest.approx(1 / 3, abs=1e-13)
    for f in ("u", "1 + u^2", "exp(u)", "cos(u)"):
        assert h_fun(f, 0.0) == pytest.approx(np.exp(0) / 2 if f == "exp(u)" else
                                              {"u": 0, "1 + u^2": 0.5, "cos(u)": 0.5}[f])


@given(w=st.floats(-3, 3).filter(lambda w: abs(w) > 1e-3))
def test_h_closed_form(w):
    assert h_fun("u", w) == pytest.approx(w / 6, abs=1e-12)
    assert h_fun("u^2", w) == pytest.approx(w * w / 12, abs=1e-12)


def test_h_continuous_through_series_switch():
    for eps in (1e-6, 1.0001e-6, 9.999e-7):
        assert h_fun("1 + u", eps) == pytest.approx(0.5 + eps / 6, abs=1e-12)


def test_potential_examples():
    ctx = WaveContext(f=__import__("gkdv").expr.parse("u"), c=1.0)
    assert potential(ctx, 3.0) == pytest.approx(0, abs=1e-12)
    assert potential(ctx, 2.0) == pytest.approx(-2 + 8 / 6, abs=1e-12)
    assert potential(ctx, 0.0) == 0.0
    ctx = WaveContext(f=ctx.f, c=0.0, k=1.0)
    assert potential(ctx, 1.0) == pytest.approx(1 + 1 / 6, abs=1e-12)


def test_potential_equals_h_form():
    f = __import__("gkdv").expr.parse("sin(u) + u^2")
    ctx = WaveContext(f, c=0.7)
    for w in (-1.2, 0.4, 2.0):
        assert potential(ctx, w) == pytest.approx((h_fun(f, w) - 0.35) * w * w, abs=1e-12)


def test_first_order_rhs_examples():
    f = __import__("gkdv").expr.parse("u")
    assert first_order_rhs(WaveContext(f, 1.0), 1.5) == pytest.approx(1.125, abs=1e-12)
    ctx = WaveContext(f, 1.0, E=potential(WaveContext(f, 1.0), 2.2))
    assert first_order_rhs(ctx, 2.2) == pytest.approx(0, abs=1e-12)
    big = WaveContext(f, 1.0, E=100.0)
    assert all(first_order_rhs(big, w) > 0 for w in np.linspace(-3, 3, 13))


def test_wave_speed_examples():
    assert wave_speed("u", 3.0) == pytest.approx(1.0, abs=1e-10)
    assert wave_speed("1", 2.5) == pytest.approx(1.0, abs=1e-12)
    assert wave_speed("u^2", 1.7) == pytest.approx(1.7**2 / 6, abs=1e-12)
    with pytest.raises(ValueError):
        wave_speed("u", 0.0)


def test_kdv_profile(kdv_profile):
    p = kdv_profile
    exact = 3 / np.cosh(p.z_samples / 2) ** 2
    assert np.max(np.abs(p.w_samples - exact)) <= 1e-6
    assert p.c == pytest.approx(1.0, abs=1e-10)
    assert decay_rate(p) == pytest.approx(1.0, rel=0.02)
    assert p.saddle_rate == pytest.approx(1.0)


def test_profile_invariants(kdv_profile):
    p = kdv_profile
    z, w = p.z_samples, p.w_samples
    assert np.all(np.diff(z) > 0)
    assert np.argmax(w) == np.argmin(np.abs(z))
    assert w[np.argmin(np.abs(z))] == pytest.approx(3.0, abs=1e-12)
    left, right = w[z <= 0], w[z >= 0]
    assert np.all(np.diff(left) >= 0) and np.all(np.diff(right) <= 0)
    # symmetric grid pairs z_j and -z_j
    j = np.arange(1, len(z))
    assert np.max(np.abs(w[j] - w[len(z) - j])) <= 1e-8 * 3
    assert p.energy_defect <= 1e-10 * (1 + 0)
    assert p.quad_mismatch <= 1e-6


def test_quadrature_agrees_with_closed_form():
    # w = 3 sech^2(z/2)  ->  z = 2 arcsech(sqrt(w/3))
    for w in (2.9, 1.5, 0.2, 1e-3):
        z = 2 * math.acosh(math.sqrt(3 / w))
        assert integral_inversion_z("u", 3.0, w) == pytest.approx(z, abs=1e-8)


def test_mkdv_profile():
    A = 0.5
    a = math.sqrt(6) * A
    p = homoclinic_profile("u^2", a)
    assert np.max(np.abs(p.w_samples - a / np.cosh(A * p.z_samples))) <= 1e-6
    assert p.c == pytest.approx(A * A, abs=1e-12)
    assert decay_rate(p) == pytest.approx(A, rel=0.02)


def test_hypothesis_violated():
    with pytest.raises(HypothesisViolated):
        homoclinic_profile("-u", 3.0)  # speed negative: origin is a centre
    with pytest.raises(HypothesisViolated):
        check_well("1 - u^2", 0.5)  # h(w) decreases: no well
    with pytest.raises(HypothesisViolated) as exc:
        check_well("u - u^2", 1.0)
    assert exc.value.w is not None


def test_decay_rate_constant_profile():
    z = np.linspace(-10, 10, 64)
    flat = WaveProfile(z, np.ones_like(z), np.zeros_like(z), 1.0, 1.0, math.nan, 1.0, 0, 0)
    with pytest.raises(InsufficientTail):
        decay_rate(flat)


def test_profile_solves_the_pde():
    # periodic grid with L = 80, N = 512 coincides with the profile grid for z_max = 40
    p = homoclinic_profile("u", 3.0, z_max=40.0, n=512)
    fld = pde.Field(80.0, 512, p.w_samples)
    u_t = p.c * p.dw_samples  # u = w(x + c t)
    assert pde.residual(fld, u_t, "u") <= 1e-6


@settings(max_examples=8)
@given(w0=st.floats(0.5, 6))
def test_kdv_family_speed_and_shape(w0):
    p = homoclinic_profile("u", w0, n=256, validate=False)
    A = math.sqrt(w0 / 12)
    assert p.c == pytest.approx(4 * A * A, rel=1e-10)
    assert np.max(np.abs(p.w_samples - w0 / np.cosh(A * p.z_samples) ** 2)) <= 1e-6 * w0
