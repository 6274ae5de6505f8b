"""Similarity reductions of u_t = f(u) u_x + u_xxx and their lifts.

Three nonlinearities admit an extra scaling-type symmetry and hence a
reduction to a third-order ODE in a similarity variable z:

    POWER  f = f0 + lam (u - u0)^alpha,  u = u0 + w(z) t^(-2/(3 alpha)),  z = (f0 t + x) / t^(1/3)
           w''' = -lam w^alpha w' - z w' / 3 - 2 w / (3 alpha)
    EXP    f = f0 + lam exp(alpha u),    u = -(2/3) ln(t) / alpha + w(z),   z as above
           w''' = -lam exp(alpha w) w' - z w' / 3 - 2 / (3 alpha)
    LOG    f = f0 + alpha ln(u - u0),    u = u0 + w(z) exp(t / (c1 alpha)), z = x + t^2 / (2 c1)
           w''' = w / (c1 alpha) - (alpha ln w + f0) w'

Translations in x and t have been gauged away; they regenerate the
general orbit. For LOG, w = exp(y) gives

    y''' + 3 y' y'' + y'^3 + (alpha y + f0) y' = 1 / (c1 alpha)

and, on a window where y is monotone, p(theta) = y'(z) with theta = y gives

    p^2 p'' + p p'^2 + 3 p^2 p' + p^3 + (alpha theta + f0) p = 1 / (c1 alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from gkdv.errors import DomainError, NonMonotone, OutOfRange, StepSizeUnderflow, WrongCase
from gkdv.expr import Add, Constant, Exp, Expr, Log, Mul, Pow, U
from gkdv.pde import residual_values

CASES = ("POWER", "EXP", "LOG", "LOG_Y", "LOG_P")
EXP_OVERFLOW = 700.0
RTOL = 1e-10
ATOL = 1e-12
MIN_SAMPLES = 200
STENCIL_H = 2e-3


@dataclass(frozen=True)
class ReducedODE:
    """z -> highest derivative as a function of (z, state)."""

    case_tag: str
    params: dict
    order: int = 3

    def __post_init__(self):
        if self.case_tag not in CASES:
            raise ValueError(f"unknown case {self.case_tag!r}")
        if self.order not in (2, 3):
            raise ValueError("order must be 2 or 3")

    def rhs(self, z: float, state) -> float:
        p = self.params
        a = p["alpha"]
        if self.case_tag == "POWER":
            w, w1, _ = state
            return -p["lam"] * _real_pow(w, a, z) * w1 - z * w1 / 3 - 2 * w / (3 * a)
        if self.case_tag == "EXP":
            w, w1, _ = state
            if a * w > EXP_OVERFLOW:
                raise DomainError(f"exp overflow: alpha*w = {a * w:.4g} > {EXP_OVERFLOW:g}",
                                  node="exp", where=float(z))
            return -p["lam"] * math.exp(a * w) * w1 - z * w1 / 3 - 2 / (3 * a)
        if self.case_tag == "LOG":
            w, w1, _ = state
            if not w > 0:
                raise DomainError(f"w = {w:.4g} <= 0 leaves the domain of ln", node="log",
                                  where=float(z))
            return w / (p["c1"] * a) - (a * math.log(w) + p["f0"]) * w1
        if self.case_tag == "LOG_Y":
            y, y1, y2 = state
            return 1 / (p["c1"] * a) - 3 * y1 * y2 - y1**3 - (a * y + p["f0"]) * y1
        # LOG_P: independent variable theta, state (p, p')
        th = z
        q, q1 = state
        if q == 0:
            raise DomainError("p = 0: the p-equation is singular", node="p", where=float(th))
        return (1 / (p["c1"] * a) - q * q1**2 - 3 * q**2 * q1 - q**3
                - (a * th + p["f0"]) * q) / q**2

    def system(self, z, y):
        out = np.empty(self.order)
        out[:-1] = y[1:]
        out[-1] = self.rhs(z, y)
        return out


def _real_pow(w: float, a: float, z: float) -> float:
    if w < 0 and not float(a).is_integer():
        raise DomainError(f"w = {w:.4g} < 0 with non-integer alpha = {a:g}", node="pow",
                          where=float(z))
    if w == 0 and a < 0:
        raise DomainError("w = 0 with negative alpha", node="pow", where=float(z))
    return w**a


def _need_alpha(alpha: float) -> None:
    if alpha == 0:
        raise ValueError("alpha must be nonzero")


def reduce_power(alpha: float, f0: float = 0.0, lam: float = 1.0) -> ReducedODE:
    """Reduced equation of the power case; f0 only enters the lift."""
    _need_alpha(alpha)
    return ReducedODE("POWER", {"alpha": float(alpha), "lam": float(lam)})


def reduce_exp(alpha: float, lam: float, f0: float = 0.0) -> ReducedODE:
    _need_alpha(alpha)
    return ReducedODE("EXP", {"alpha": float(alpha), "lam": float(lam)})


def reduce_log(alpha: float, f0: float = 0.0, c1: float = 1.0) -> ReducedODE:
    _need_alpha(alpha)
    if c1 == 0:
        raise ValueError("c1 must be nonzero")
    return ReducedODE("LOG", {"alpha": float(alpha), "f0": float(f0), "c1": float(c1)})


def reduce_log_y(alpha: float, f0: float = 0.0, c1: float = 1.0) -> ReducedODE:
    _need_alpha(alpha)
    return ReducedODE("LOG_Y", {"alpha": float(alpha), "f0": float(f0), "c1": float(c1)})


def reduce_log_p(alpha: float, f0: float = 0.0, c1: float = 1.0) -> ReducedODE:
    _need_alpha(alpha)
    return ReducedODE("LOG_P", {"alpha": float(alpha), "f0": float(f0), "c1": float(c1)},
                      order=2)


@dataclass(frozen=True)
class Trajectory:
    z_samples: np.ndarray
    states: np.ndarray  # shape (len(z_samples), order)
    case_tag: str
    ode: ReducedODE
    dense: object = field(repr=False, compare=False)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.z_samples[0]), float(self.z_samples[-1])

    def __call__(self, z) -> np.ndarray:
        """Interpolated state at z (rows = derivative order)."""
        return self.dense(z)

    def third_derivative(self, z, h: float = STENCIL_H) -> np.ndarray:
        """w''' from a 5-point central difference of the interpolated w''.

        Deliberately independent of the ODE right-hand side, so residual
        checks built on it test the equation rather than restate it. Near the
        ends of the span the stencil is shifted inwards.
        """
        z = np.atleast_1d(np.asarray(z, dtype=float))
        lo, hi = self.span
        zc = np.clip(z, lo + 2 * h, hi - 2 * h)
        k = self.ode.order - 1
        g = [self.dense(zc + s * h)[k] for s in (-2, -1, 0, 1, 2)]
        deriv = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h)
        shift = z - zc
        if np.any(shift):
            curv = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h)
            deriv = deriv + shift * curv
        return deriv


def integrate(ode: ReducedODE, z0: float, state0, z1: float, rtol: float = RTOL,
              atol: float = ATOL, n_samples: int = MIN_SAMPLES) -> Trajectory:
    """Adaptive DOP853 (embedded 8(5,3) pair) with dense output."""
    state0 = np.asarray(state0, dtype=float)
    if state0.shape != (ode.order,):
        raise ValueError(f"state0 must have {ode.order} entries")
    ode.rhs(z0, state0)  # raises DomainError on a bad start
    if z1 == z0:
        raise ValueError("z1 must differ from z0")
    sol = solve_ivp(ode.system, (z0, z1), state0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True)
    if sol.status == -1:
        z_fail = float(sol.t[-1])
        raise StepSizeUnderflow(f"integration stalled at z = {z_fail:.6g}: {sol.message}",
                                z=z_fail)
    zs = np.linspace(z0, z1, max(n_samples, MIN_SAMPLES))
    if z1 < z0:
        zs = zs[::-1]
    states = sol.sol(zs).T
    return Trajectory(zs, states, ode.case_tag, ode, sol.sol)


# ------------------------------------------------------------ first integral

@dataclass(frozen=True)
class FirstIntegralReport:
    k_mean: float
    k_drift: float

    def as_dict(self) -> dict:
        return {"k_mean": self.k_mean, "k_drift": self.k_drift}


def painleve_first_integral(traj: Trajectory) -> FirstIntegralReport:
    """Mean and max deviation of I = 3 w'' + z w + w^3 along an alpha=2 power trajectory."""
    p = traj.ode.params
    if traj.case_tag != "POWER" or p["alpha"] != 2.0 or p["lam"] != 1.0:
        raise WrongCase("first integral 3w'' + zw + w^3 needs the alpha = 2 power reduction")
    z = traj.z_samples
    w, _, w2 = traj.states.T
    I = 3 * w2 + z * w + w**3
    k = float(np.mean(I))
    return FirstIntegralReport(k, float(np.max(np.abs(I - k))))


# -------------------------------------------------------------------- lifts

def case_nonlinearity(case_tag: str, params: dict) -> Expr:
    """The f(u) a reduction belongs to, as an expression."""
    a = Constant(float(params["alpha"]))
    f0 = Constant(float(params.get("f0", 0.0)))
    lam = Constant(float(params.get("lam", 1.0)))
    shifted = Add((U, Constant(-float(params.get("u0", 0.0)))))
    if case_tag == "POWER":
        return Add((f0, Mul((lam, Pow(shifted, a)))))
    if case_tag == "EXP":
        return Add((f0, Mul((lam, Exp(Mul((a, U)))))))
    if case_tag == "LOG":
        return Add((f0, Mul((a, Log(shifted)))))
    raise WrongCase(f"no lift for case {case_tag}")


@dataclass(frozen=True)
class LiftResult:
    x: np.ndarray
    t: np.ndarray
    u: np.ndarray  # shape (len(t), len(x))
    residual_per_t: np.ndarray
    residual_max: float

    def as_dict(self) -> dict:
        return {"residual_max": self.residual_max,
                "residual_per_t": self.residual_per_t.tolist()}


def _similarity(case_tag: str, p: dict, x: np.ndarray, t: float):
    """z, dz/dt, dz/dx, and the maps u = A(t) w + B(t) with A', B'."""
    a = p["alpha"]
    f0 = p.get("f0", 0.0)
    if case_tag in ("POWER", "EXP"):
        if not t > 0:
            raise OutOfRange(f"t = {t:g}: similarity lift needs t > 0")
        s = t ** (1 / 3)
        z = (f0 * t + x) / s
        z_t = f0 / s - z / (3 * t)
        z_x = 1 / s
        if case_tag == "POWER":
            Am = t ** (-2 / (3 * a))
            return z, z_t, z_x, Am, -2 / (3 * a) * Am / t, p.get("u0", 0.0), 0.0
        return z, z_t, z_x, 1.0, 0.0, -(2 / 3) * math.log(t) / a, -2 / (3 * a * t)
    c1 = p["c1"]
    z = x + t * t / (2 * c1)
    Am = math.exp(t / (c1 * a))
    return z, t / c1, 1.0, Am, Am / (c1 * a), p.get("u0", 0.0), 0.0


def lift(traj: Trajectory, case_tag: str, params: dict, t_grid, x_window,
         nx: int = 64) -> LiftResult:
    """Evaluate u(x, t) on a patch and its gKdV residual.

    u_t and u_x come from the chain rule on the similarity form, using w and
    its derivatives from the dense solution; w''' is differenced from w''.
    """
    if traj.case_tag != case_tag:
        raise WrongCase(f"trajectory is {traj.case_tag}, lift requested for {case_tag}")
    p = dict(traj.ode.params)
    p.update(params)
    f = case_nonlinearity(case_tag, p)
    x = np.linspace(float(x_window[0]), float(x_window[1]), nx)
    ts = np.asarray(t_grid, dtype=float)
    lo, hi = sorted(traj.span)
    us, res = [], []
    for t in ts:
        z, z_t, z_x, Am, Am_t, B, B_t = _similarity(case_tag, p, x, float(t))
        if z.min() < lo or z.max() > hi:
            raise OutOfRange(f"t = {t:g} needs z in [{z.min():.4g}, {z.max():.4g}], "
                             f"trajectory covers [{lo:.4g}, {hi:.4g}]")
        w, w1, w2 = traj(z)
        w3 = traj.third_derivative(z)
        u = Am * w + B
        u_t = Am_t * w + Am * w1 * z_t + B_t
        u_x = Am * w1 * z_x
        u_xxx = Am * w3 * z_x**3
        r = residual_values(u, u_t, u_x, u_xxx, f)
        us.append(u)
        res.append(float(np.max(np.abs(r))))
    res = np.asarray(res)
    return LiftResult(x, ts, np.asarray(us), res, float(res.max()))


# ------------------------------------------------------------- LOG y/p chain

@dataclass(frozen=True)
class ChainReport:
    y_residual: float
    monotone: bool
    p_residual: float | None
    p_residual_literal: float | None

    def require_monotone(self) -> "ChainReport":
        if not self.monotone:
            raise NonMonotone("y' changes sign on the window; p(theta) is not defined")
        return self

    def as_dict(self) -> dict:
        return {"y_residual": self.y_residual, "monotone": self.monotone,
                "p_residual": self.p_residual, "p_residual_literal": self.p_residual_literal}


def verify_y_and_p_chain(alpha: float, f0: float, c1: float, traj_w: Trajectory,
                         strict: bool = False, trim: int = 3) -> ChainReport:
    """Check the y = ln w and p(theta) = y' forms of the LOG reduction.

    The p residual is reported twice: for the chain-rule form (with the
    p p'^2 term) and for the form without it, which generally does not hold.
    With ``strict`` a non-monotone window raises :class:`NonMonotone`.
    """
    z = traj_w.z_samples[trim:-trim] if trim else traj_w.z_samples
    w, w1, w2 = traj_w(z)
    if np.any(w <= 0):
        raise DomainError("w must stay positive for y = ln w", node="log")
    w3 = traj_w.third_derivative(z)
    y = np.log(w)
    y1 = w1 / w
    y2 = w2 / w - y1**2
    y3 = w3 / w - 3 * y1 * y2 - y1**3
    rhs = 1 / (c1 * alpha)
    y_res = y3 + 3 * y1 * y2 + y1**3 + (alpha * y + f0) * y1 - rhs
    y_residual = float(np.max(np.abs(y_res)))

    monotone = bool(np.all(y1 > 0) or np.all(y1 < 0))
    if not monotone:
        report = ChainReport(y_residual, False, None, None)
        return report.require_monotone() if strict else report

    # theta = y, p(theta) = y'(z); derivatives in theta via dtheta = y' dz
    q = y1
    q1 = y2 / y1
    q2 = (y3 / y1 - y2**2 / y1**2) / y1
    base = q**2 * q2 + 3 * q**2 * q1 + q**3 + (alpha * y + f0) * q - rhs
    p_res = base + q * q1**2
    return ChainReport(y_residual, True, float(np.max(np.abs(p_res))),
                       float(np.max(np.abs(base))))
