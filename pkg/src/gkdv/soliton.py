"""Closed-form sech^beta solitary waves for f(u) = f0 + (u - u0)^alpha.

    u(x, t) = u0 + a sech^beta(A (x - c3 t) + b)

solves u_t = f(u) u_x + u_xxx exactly when

    beta = 2 / alpha
    A^2 (beta + 1)(beta + 2) = a^(2 / beta)
    f0 + c3 + A^2 beta^2 = 0

The wave travels with velocity c3 < 0, i.e. with speed -c3 in the frame
z = x + c t used by :mod:`gkdv.travelwave`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from gkdv.errors import ForbiddenExponent, NegativeBase
from gkdv.expr import Abs, Add, Constant, Expr, Pow, U, evaluate

FORBIDDEN_ALPHA = (0.0, -1.0, -2.0)


@dataclass(frozen=True)
class SolitonParams:
    a: float
    A: float
    beta: float
    b_phase: float
    c3: float
    u0: float
    f0: float
    alpha: float

    @property
    def speed(self) -> float:
        """Speed c in the co-moving variable z = x + c t."""
        return -self.c3

    def closed_form_defects(self) -> dict:
        """Normalised defect of each algebraic condition (0 for an exact solution)."""
        b = self.beta
        lhs = self.A**2 * (b + 1) * (b + 2)
        rhs = abs(self.a) ** (2 / b)
        return {
            "amplitude": abs(rhs - lhs) / abs(lhs),
            "speed": abs(self.f0 + self.c3 + self.A**2 * b**2) / _speed_norm(self),
            "exponent": abs(self.alpha - 2 / b) / max(1.0, abs(self.alpha)),
        }

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in
                ("a", "A", "beta", "b_phase", "c3", "u0", "f0", "alpha")}


def _speed_norm(p: SolitonParams) -> float:
    return max(1.0, abs(p.f0), abs(p.c3), p.A**2 * p.beta**2)


def _check_alpha(alpha: float) -> None:
    if any(alpha == f for f in FORBIDDEN_ALPHA):
        raise ForbiddenExponent(f"alpha = {alpha:g} is excluded (alpha must avoid 0, -1, -2)")


def solve_params(alpha: float, A: float, f0: float = 0.0, u0: float = 0.0,
                 b_phase: float = 0.0) -> SolitonParams:
    """Amplitude and speed for inverse width A (amplitude from A, never the reverse)."""
    _check_alpha(alpha)
    if not A > 0:
        raise ValueError("A must be positive")
    beta = 2.0 / alpha
    base = A**2 * (beta + 1) * (beta + 2)
    half = beta / 2
    if base < 0 and not float(half).is_integer():
        raise NegativeBase(
            f"A^2 (beta+1)(beta+2) = {base:g} < 0 has no real power {half:g}; "
            "no real amplitude for this alpha")
    a = float(np.power(base, half)) if base >= 0 else float(base ** int(half))
    c3 = -f0 - A**2 * beta**2
    return SolitonParams(a=a, A=A, beta=beta, b_phase=b_phase, c3=c3, u0=u0, f0=f0,
                         alpha=alpha)


def nonlinearity(p: SolitonParams) -> Expr:
    """f0 + (u - u0)^alpha; the base is wrapped in abs() for non-integer alpha
    so that round-off below the pedestal does not leave the real domain."""
    base = Add((U, Constant(-p.u0))) if p.u0 != 0 else U
    if not float(p.alpha).is_integer():
        base = Abs(base)
    power = Pow(base, Constant(p.alpha))
    return Add((Constant(p.f0), power)) if p.f0 != 0 else power


def phase(p: SolitonParams, x, t):
    return p.A * (np.asarray(x, dtype=float) - p.c3 * t) + p.b_phase


def eval_soliton(p: SolitonParams, x, t):
    theta = phase(p, x, t)
    return p.u0 + p.a / np.cosh(theta) ** p.beta


def soliton_derivatives(p: SolitonParams, x, t):
    """Analytic (u_t, u_x, u_xxx)."""
    theta = phase(p, x, t)
    s = 1.0 / np.cosh(theta)
    tn = np.tanh(theta)
    b = p.beta
    sb = s**b
    w1 = -p.a * b * sb * tn
    w3 = -p.a * b**3 * sb * tn + p.a * b * (b + 1) * (b + 2) * sb * s**2 * tn
    u_x = p.A * w1
    return -p.c3 * u_x, u_x, p.A**3 * w3


def residual_closed_form(p: SolitonParams, f: Expr | None = None, n: int = 400,
                         span: float = 10.0) -> float:
    """max |u_t - f(u) u_x - u_xxx| on n points with phase in [-span, span]."""
    f = nonlinearity(p) if f is None else f
    theta = np.linspace(-span, span, n)
    x = (theta - p.b_phase) / p.A
    u = eval_soliton(p, x, 0.0)
    u_t, u_x, u_xxx = soliton_derivatives(p, x, 0.0)
    return float(np.max(np.abs(u_t - evaluate(f, u) * u_x - u_xxx)))


def residual_scale(p: SolitonParams) -> float:
    return 1.0 + abs(p.a) ** (1 + p.alpha)


PERTURBATIONS = ("amplitude", "speed", "exponent", "pedestal")


def perturb(p: SolitonParams, which: str, rel: float = 0.01) -> tuple[SolitonParams, Expr]:
    """Break exactly one of the four algebraic conditions.

    Each condition is pushed to a normalised defect of ``rel`` (the same
    normalisation as :meth:`SolitonParams.closed_form_defects`; the pedestal
    condition u0 = c is shifted by ``rel * max(1, |u0|)``). Returns the
    perturbed wave together with the nonlinearity the residual must be
    measured against.
    """
    f = nonlinearity(p)
    if which == "amplitude":
        base = p.A**2 * (p.beta + 1) * (p.beta + 2) * (1 + rel)
        return replace(p, a=float(np.power(base, p.beta / 2))), f
    if which == "speed":
        return replace(p, c3=p.c3 - rel * _speed_norm(p)), f
    if which == "exponent":
        return p, nonlinearity(replace(p, alpha=p.alpha * (1 + rel)))
    if which == "pedestal":
        return replace(p, u0=p.u0 + rel * max(1.0, abs(p.u0))), f
    raise ValueError(f"unknown perturbation {which!r}")
