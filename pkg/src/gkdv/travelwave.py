"""Plane waves u = w(x + c t) and their solitary-wave (homoclinic) profiles.

With F(w) = int_0^w f the profile obeys w'' = c w - F(w) + k, a
Hamiltonian system with energy H = w'^2 / 2 + V(w) and potential

    V(w) = -c w^2 / 2 + k w + int_0^w F.

A solitary wave is the k = 0, E = 0 orbit homoclinic to the saddle at
the origin. Writing h(w) = w^-2 int_0^w F, one has V = (h - c/2) w^2, so a
wave with crest w0 travels with speed c = 2 h(w0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from gkdv.errors import HypothesisViolated, InsufficientTail
from gkdv.expr import Expr, as_expr, diff, evaluate

QUAD_TOL = 1e-12
H_SERIES_EPS = 1e-6


@dataclass(frozen=True)
class WaveContext:
    f: Expr
    c: float
    k: float = 0.0
    E: float = 0.0


@dataclass(frozen=True)
class WaveProfile:
    z_samples: np.ndarray
    w_samples: np.ndarray
    dw_samples: np.ndarray
    c: float
    w0: float
    decay_rate: float
    saddle_rate: float
    energy_defect: float
    quad_mismatch: float


def _scalar(f: Expr):
    return lambda x: evaluate(f, x)


def big_F(f, w: float) -> float:
    """F(w) = int_0^w f by adaptive quadrature."""
    f = as_expr(f)
    val, _ = quad(_scalar(f), 0.0, w, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return float(val)


_GL = [np.polynomial.legendre.leggauss(n) for n in (48, 64)]


def _gauss01(fn) -> float | None:
    """int_0^1 fn by two Gauss-Legendre rules; None if they disagree."""
    vals = []
    for x, w in _GL:
        s = 0.5 * (x + 1)
        vals.append(0.5 * float(np.dot(w, fn(s))))
    if abs(vals[0] - vals[1]) <= 1e-13 * (1 + abs(vals[1])):
        return vals[1]
    return None


def h_fun(f, w: float) -> float:
    """h(w) = w^-2 int_0^w int_0^eta f, continued by f(0)/2 + f'(0) w / 6 near 0.

    Away from zero the double integral is evaluated as int_0^1 (1 - s) f(w s) ds,
    which equals it exactly and avoids dividing by w^2. Smooth integrands are
    handled by paired Gauss rules; adaptive quadrature takes over otherwise.
    """
    f = as_expr(f)
    if abs(w) <= H_SERIES_EPS:
        return evaluate(f, 0.0) / 2 + evaluate(diff(f), 0.0) * w / 6
    fast = _gauss01(lambda s: (1 - s) * evaluate(f, w * s))
    if fast is not None:
        return fast
    g = _scalar(f)
    val, _ = quad(lambda s: (1 - s) * g(w * s), 0.0, 1.0, epsabs=QUAD_TOL,
                  epsrel=QUAD_TOL, limit=200)
    return float(val)


def potential(ctx: WaveContext, w: float) -> float:
    return -ctx.c * w * w / 2 + ctx.k * w + h_fun(ctx.f, w) * w * w


def first_order_rhs(ctx: WaveContext, w: float) -> float:
    """(dw/dz)^2 on the energy-E orbit; negative means w is not reached."""
    return 2 * ctx.E - 2 * potential(ctx, w)


def wave_speed(f, w0: float) -> float:
    if w0 == 0:
        raise ValueError("crest value w0 must be nonzero")
    return 2 * h_fun(f, w0)


def check_well(f, w0: float, samples: int = 400) -> float:
    """Verify the homoclinic hypotheses for crest w0 and return the speed.

    Requires h(w) < h(w0) on the open segment between 0 and w0, a simple
    zero of V at w0 and a hyperbolic saddle at the origin.
    """
    f = as_expr(f)
    c = wave_speed(f, w0)
    f0 = evaluate(f, 0.0)
    if not c - f0 > 0:
        raise HypothesisViolated(
            f"origin is not a hyperbolic saddle: c - f(0) = {c - f0:.3g} <= 0", w=0.0)
    ctx = WaveContext(f, c)
    for s in np.linspace(0, 1, samples + 2)[1:-1]:
        w = s * w0
        if potential(ctx, w) >= 0:
            raise HypothesisViolated(f"V(w) >= 0 inside the well at w = {w:.6g}", w=float(w))
    slope = -c * w0 + big_F(f, w0)
    if abs(slope) <= 1e-10 * (1 + abs(c * w0)):
        raise HypothesisViolated(f"V has a multiple zero at w0 = {w0:g}", w=float(w0))
    return c


def _half_orbit(f: Expr, c: float, w0: float, direction: int, eps: float):
    """Integrate from the tail value eps*w0 towards the crest, stopping at w' = 0.

    Returns (solution, distance from start to crest). ``direction`` is +1
    for the left half (z increasing towards the crest) and -1 for the right.
    """
    ctx = WaveContext(f, c)
    w_start = eps * w0
    v_start = direction * math.copysign(math.sqrt(-2 * potential(ctx, w_start)), w0)
    fv = _scalar(f)

    def rhs(_, y):
        w, v, F = y
        return [v, c * w - F, fv(w) * v]

    def crest(_, y):
        return y[1]

    crest.terminal = True
    y0 = [w_start, v_start, big_F(f, w_start)]
    span = direction * 200.0 / math.sqrt(c - evaluate(f, 0.0))
    sol = solve_ivp(rhs, (0.0, span), y0, method="DOP853", rtol=1e-13, atol=1e-300,
                    dense_output=True, events=crest)
    if sol.status != 1:
        raise HypothesisViolated("orbit never reached a turning point", w=float(w0))
    return sol.sol, float(sol.t_events[0][0])


def integral_inversion_z(f, w0: float, w: float, c: float | None = None) -> float:
    """|z| at which the profile takes value w, from the quadrature formula.

    Uses w = w0 (1 - s^2) to remove the inverse-square-root singularity at
    the crest.
    """
    f = as_expr(f)
    c = wave_speed(f, w0) if c is None else c
    s_end = math.sqrt(max(0.0, 1 - w / w0))

    def integrand(s):
        v = w0 * (1 - s * s)
        gap = c - 2 * h_fun(f, v)
        return 2 * w0 * s / (v * math.sqrt(gap)) if gap > 0 else 0.0

    val, _ = quad(integrand, 0.0, s_end, epsabs=1e-12, epsrel=1e-12, limit=200)
    return abs(val)


def homoclinic_profile(f, w0: float, z_max: float | None = None, n: int = 512,
                       validate: bool = True) -> WaveProfile:
    """Solitary-wave profile with crest w0 at z = 0 on a uniform periodic grid.

    Each half of the orbit is integrated from its exponentially small tail
    towards the crest (the stable direction for a saddle), starting on the
    E = 0 level set. Beyond the starting point the exact linear tail is used.
    """
    f = as_expr(f)
    c = check_well(f, w0)
    rate = math.sqrt(c - evaluate(f, 0.0))
    if z_max is None:
        z_max = 30.0 / rate
    eps = 1e-16
    z = -z_max + 2 * z_max * np.arange(n) / n

    w = np.empty(n)
    dw = np.empty(n)
    for direction, mask in ((1, z <= 0), (-1, z > 0)):
        sol, z_crest = _half_orbit(f, c, w0, direction, eps)
        # local integration variable s maps to z = s - z_crest
        s = z[mask] + z_crest
        inside = (s * direction) >= 0
        y = sol(s[inside]) if np.any(inside) else np.zeros((3, 0))
        wi = np.empty(mask.sum())
        di = np.empty(mask.sum())
        wi[inside], di[inside] = y[0], y[1]
        tail = ~inside
        wi[tail] = eps * w0 * np.exp(-rate * np.abs(s[tail]))
        di[tail] = direction * rate * wi[tail]
        w[mask], dw[mask] = wi, di

    ctx = WaveContext(f, c)
    energy = np.array([0.5 * d * d + potential(ctx, x) for x, d in zip(w, dw)])
    energy_defect = float(np.max(np.abs(energy)))

    mismatch = 0.0
    if validate:
        cand = np.where((np.abs(w) >= 1e-3 * abs(w0)) & (z != 0))[0]
        if len(cand):
            pick = cand[np.linspace(0, len(cand) - 1, max(1, n // 8)).astype(int)]
            for j in np.unique(pick):
                zq = integral_inversion_z(f, w0, w[j], c)
                mismatch = max(mismatch, abs(zq - abs(z[j])) * abs(dw[j]))

    prof = WaveProfile(z, w, dw, c, float(w0), float("nan"), rate, energy_defect, mismatch)
    try:
        fitted = decay_rate(prof)
    except InsufficientTail:
        fitted = float("nan")
    return WaveProfile(z, w, dw, c, float(w0), fitted, rate, energy_defect, mismatch)


def decay_rate(profile: WaveProfile) -> float:
    """Least-squares exponential rate of the z > 0 tail (|w| below 1e-3 |w0|)."""
    z, w = profile.z_samples, np.abs(profile.w_samples)
    w0 = abs(profile.w0)
    sel = (z > 0) & (w < 1e-3 * w0) & (w > 1e-12 * w0)
    if sel.sum() < 5:
        raise InsufficientTail("fewer than 5 tail samples below 1e-3 w0")
    slope, _ = np.polyfit(z[sel], np.log(w[sel]), 1)
    return float(-slope)
