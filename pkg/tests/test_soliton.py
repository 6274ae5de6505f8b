import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkdv.errors import ForbiddenExponent, NegativeBase
from gkdv.expr import evaluate
from gkdv.soliton import (PERTURBATIONS, eval_soliton, nonlinearity, perturb, residual_closed_form,
                          residual_scale, soliton_derivatives, solve_params)
from gkdv.travelwave import homoclinic_profile, wave_speed


def test_solve_params_examples():
    p = solve_params(1, 0.5)
    assert (p.beta, p.a, p.c3) == (2.0, pytest.approx(3.0), pytest.approx(-1.0))
    p = solve_params(2, 0.5)
    assert p.beta == 1.0
    assert p.a == pytest.approx(math.sqrt(1.5), rel=1e-15)
    assert p.c3 == pytest.approx(-0.25)
    r2 = math.sqrt(2)
    p = solve_params(r2, 0.7, f0=0.3)
    assert p.beta == pytest.approx(r2)
    assert p.a**r2 == pytest.approx(0.49 * (4 + 3 * r2), rel=1e-13)
    assert p.c3 == pytest.approx(-0.3 - 2 * 0.49)


@pytest.mark.parametrize("alpha", [0, -1, -2])
def test_forbidden(alpha):
    with pytest.raises(ForbiddenExponent):
        solve_params(alpha, 0.5)


def test_negative_base():
    # alpha = -1.5: beta = -4/3, (beta+1)(beta+2) < 0, beta/2 non-integer
    with pytest.raises(NegativeBase):
        solve_params(-1.5, 0.5)


def test_invariants_hold():
    for alpha in (1, 2, math.sqrt(2), 0.5, 3.7, -4):
        p = solve_params(alpha, 0.5, f0=0.4, u0=-0.2)
        d = p.closed_form_defects()
        assert d["amplitude"] <= 1e-12 and d["speed"] <= 1e-12 and d["exponent"] <= 1e-15


def test_eval_examples():
    p = solve_params(1, 0.5)
    assert eval_soliton(p, 0.0, 0.0) == pytest.approx(3.0)
    q = solve_params(2, 0.5, u0=0.7, b_phase=1.3)
    crest_x = -1.3 / 0.5
    assert eval_soliton(q, crest_x, 0.0) == pytest.approx(0.7 + q.a)
    assert eval_soliton(q, 1e3, 0.0) == pytest.approx(0.7, abs=1e-12)


def test_derivative_identities(rng):
    p = solve_params(math.sqrt(2), 0.6, f0=0.5, u0=0.1, b_phase=0.3)
    x = rng.uniform(-10, 10, 50)
    u_t, u_x, u_xxx = soliton_derivatives(p, x, 0.4)
    assert np.allclose(u_t, -p.c3 * u_x, rtol=0, atol=0)
    crest = -p.b_phase / p.A + p.c3 * 0.4
    assert soliton_derivatives(p, crest, 0.4)[1] == pytest.approx(0, abs=1e-15)
    h, h3 = 1e-4, 1e-3
    u = lambda xx: eval_soliton(p, xx, 0.4)  # noqa: E731
    fd1 = (u(x + h) - u(x - h)) / (2 * h)
    fd3 = (u(x + 2 * h3) - 2 * u(x + h3) + 2 * u(x - h3) - u(x - 2 * h3)) / (2 * h3**3)
    ut_fd = (eval_soliton(p, x, 0.4 + h) - eval_soliton(p, x, 0.4 - h)) / (2 * h)
    scale = 1 + np.max(np.abs(u_x))
    assert np.max(np.abs(fd1 - u_x)) <= 1e-7 * scale
    assert np.max(np.abs(ut_fd - u_t)) <= 1e-7 * scale
    assert np.max(np.abs(fd3 - u_xxx)) <= 1e-5 * (1 + np.max(np.abs(u_xxx)))


@pytest.mark.parametrize("alpha", [1.0, 2.0, math.sqrt(2)])
@pytest.mark.parametrize("f0", [0.0, 1.0])
def test_residual_and_perturbations(alpha, f0):
    p = solve_params(alpha, 0.5, f0=f0)
    assert residual_closed_form(p) <= 1e-9 * residual_scale(p)
    for which in PERTURBATIONS:
        q, f = perturb(p, which)
        assert residual_closed_form(q, f) > 1e-3, which


def test_literal_example_two_fails():
    # a^2 = 6A read literally (A != 1) is not a solution
    p = solve_params(2, 0.5)
    literal = p.__class__(**{**p.as_dict(), "a": math.sqrt(6 * 0.5)})
    assert residual_closed_form(literal) > 1e-3


def test_perturb_c3_by_one_percent():
    p = solve_params(1, 0.5)
    q = p.__class__(**{**p.as_dict(), "c3": p.c3 * 1.01})
    assert residual_closed_form(q) > 1e-3


def test_nonlinearity_expression():
    p = solve_params(2.5, 0.5, f0=0.2, u0=-1.0)
    f = nonlinearity(p)
    assert evaluate(f, 1.0) == pytest.approx(0.2 + 2.0**2.5)
    assert evaluate(f, -1.0) == pytest.approx(0.2)


def test_beta_decreases_with_alpha():
    betas = [solve_params(a, 0.5).beta for a in (0.5, 1, 2, 4)]
    assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))


@pytest.mark.parametrize("alpha,f", [(1, "u"), (2, "u^2")])
def test_consistent_with_travelwave(alpha, f):
    p = solve_params(alpha, 0.5)
    prof = homoclinic_profile(f, p.a)
    exact = eval_soliton(p, prof.z_samples, 0.0)
    assert np.max(np.abs(prof.w_samples - exact)) <= 1e-6
    assert wave_speed(f, p.a) == pytest.approx(-p.c3, abs=1e-10)


@given(alpha=st.floats(0.3, 5), A=st.floats(0.1, 1.5), f0=st.floats(-2, 2),
       u0=st.floats(-2, 2), b=st.floats(-5, 5))
def test_residual_vanishes_across_family(alpha, A, f0, u0, b):
    p = solve_params(alpha, A, f0=f0, u0=u0, b_phase=b)
    assert residual_closed_form(p) <= 1e-9 * residual_scale(p)


@given(du=st.floats(-3, 3), db=st.floats(-3, 3))
def test_gauge_invariance(du, db):
    p = solve_params(1.5, 0.5)
    q = solve_params(1.5, 0.5, u0=du, b_phase=db)
    assert abs(residual_closed_form(q) - residual_closed_form(p)) <= 1e-12 * residual_scale(p)
