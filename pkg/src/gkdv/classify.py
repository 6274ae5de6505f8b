"""Lie point symmetry classification of u_t = f(u) u_x + u_xxx.

Every symmetry beyond the two translations is an affine vector field

    X = (a0 + a1 t + b x) d/dx + (tau0 + 3 b t) d/dt + (c + d u) d/du

subject to the single linear constraint

    (c + d u) f'(u) + 2 b f(u) + a1 = 0        for all u.

Sampling that constraint at m points gives an m x 4 linear system in
(c, d, 2b, a1); its nullspace is the space of extra symmetries. The
classifier reads the case off the nullspace direction and never solves
the constraint symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gkdv.errors import DegenerateSampling, InconsistentNullity
from gkdv.expr import Add, Constant, Div, Expr, Mul, Neg, Pow, as_expr, diff, evaluate, simplify

CASES = ("A", "B1", "B2", "B3_POWER", "B3_EXP", "B3_LOG")

RANK_TOL = 1e-9
ZERO_TOL = 1e-8
FLAT_TOL = 1e-10


@dataclass(frozen=True)
class DomainInterval:
    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def parse(cls, text: str) -> "DomainInterval":
        lo, hi = (float(p) for p in text.split(","))
        return cls(lo, hi)

    @property
    def contains_origin(self) -> bool:
        return self.lo < 0 < self.hi or (self.lo == 0 and not self.lo_open) or (
            self.hi == 0 and not self.hi_open)

    def chebyshev(self, m: int) -> np.ndarray:
        """m first-kind Chebyshev nodes, all strictly interior, ascending."""
        k = np.arange(m)
        x = np.cos((2 * k + 1) * np.pi / (2 * m))[::-1]
        return 0.5 * (self.lo + self.hi) + 0.5 * (self.hi - self.lo) * x

    def shifted(self) -> "DomainInterval":
        w = self.hi - self.lo
        return DomainInterval(self.lo + 0.05 * w, self.hi - 0.02 * w)


DEFAULT_DOMAIN = DomainInterval(-1.0, 1.0)


@dataclass(frozen=True)
class SymmetryGenerator:
    """xi = a0 + a1 t + b x,  tau = tau0 + 3 b t,  eta = c + d u."""

    tau0: float = 0.0
    a0: float = 0.0
    a1: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def xi(self, x, t):
        return self.a0 + self.a1 * t + self.b * x

    def tau(self, t):
        return self.tau0 + 3 * self.b * t

    def eta(self, u):
        return self.c + self.d * u

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("tau0", "a0", "a1", "b", "c", "d")}

    @classmethod
    def from_nullvector(cls, v) -> "SymmetryGenerator":
        c, d, two_b, a1 = (float(x) for x in v)
        return cls(a1=a1, b=two_b / 2, c=c, d=d)

    def affine_matrix(self) -> np.ndarray:
        """Matrix M with d/de (x, t, u, 1) = M (x, t, u, 1)."""
        return np.array([
            [self.b, self.a1, 0.0, self.a0],
            [0.0, 3 * self.b, 0.0, self.tau0],
            [0.0, 0.0, self.d, self.c],
            [0.0, 0.0, 0.0, 0.0],
        ])

    def describe(self) -> str:
        def lin(terms):
            out = []
            for coef, sym in terms:
                if coef == 0:
                    continue
                s = f"{coef:+.6g}"
                out.append(s + (f"*{sym}" if sym else ""))
            return " ".join(out) if out else "0"

        parts = []
        xi = lin([(self.a0, ""), (self.a1, "t"), (self.b, "x")])
        tau = lin([(self.tau0, ""), (3 * self.b, "t")])
        eta = lin([(self.c, ""), (self.d, "u")])
        for coef, name in ((xi, "d/dx"), (tau, "d/dt"), (eta, "d/du")):
            if coef != "0":
                parts.append(f"({coef}) {name}")
        return " + ".join(parts) if parts else "0"


TIME_TRANSLATION = SymmetryGenerator(tau0=1.0)
SPACE_TRANSLATION = SymmetryGenerator(a0=1.0)


@dataclass(frozen=True)
class NullspaceReport:
    samples: np.ndarray
    singular_values: np.ndarray
    rank: int
    nullity: int
    basis: np.ndarray  # rows are unit vectors in (c, d, 2b, a1)
    residuals: np.ndarray


@dataclass(frozen=True)
class ClassificationResult:
    case_tag: str
    params: dict
    nullity: int
    generators: tuple
    notes: tuple = ()
    nullspace: np.ndarray | None = field(default=None, compare=False)

    @property
    def extra_symmetry_nullity(self) -> int:
        return self.nullity

    def as_dict(self) -> dict:
        return {
            "case": self.case_tag,
            "params": {k: float(v) for k, v in sorted(self.params.items())},
            "nullity": self.nullity,
            "generators": [g.as_dict() for g in self.generators],
            "notes": list(self.notes),
        }


# ------------------------------------------------------------------ conditions

def symmetry_condition_expr(f) -> Expr:
    """f'''' f''^2 f' + f''' f''^3 - 2 f'''^2 f'' f', simplified.

    Vanishes identically exactly when the equation has more than the two
    translation symmetries.
    """
    f = as_expr(f)
    f1 = diff(f)
    f2 = diff(f1)
    f3 = diff(f2)
    f4 = diff(f3)
    two, three = Constant(2.0), Constant(3.0)
    return simplify(Add((
        Mul((f4, Pow(f2, two), f1)),
        Mul((f3, Pow(f2, three))),
        Neg(Mul((two, Pow(f3, two), f2, f1))),
    )))


def log_condition_expr(f) -> Expr:
    """d^2/du^2 (f'/f''); only meaningful where f'' != 0."""
    f = as_expr(f)
    f1 = diff(f)
    return diff(Div(f1, diff(f1)), 2)


def condition_scale(f, u) -> np.ndarray:
    """Pointwise magnitude of the individual terms of the symmetry condition."""
    f = as_expr(f)
    d = [f]
    for _ in range(4):
        d.append(diff(d[-1]))
    v1, v2, v3, v4 = (np.abs(evaluate(e, u)) for e in d[1:])
    return v4 * v2**2 * v1 + v3 * v2**3 + 2 * v3**2 * v2 * v1


def condition_vanishes(f, domain: DomainInterval = DEFAULT_DOMAIN, m: int = 12,
                       rtol: float = 1e-9) -> bool:
    u = domain.chebyshev(m)
    val = np.abs(evaluate(symmetry_condition_expr(f), u))
    return bool(np.all(val <= rtol * (1.0 + condition_scale(f, u))))


# ------------------------------------------------------------------- nullspace

def eqf3_matrix(f, u) -> np.ndarray:
    f = as_expr(f)
    u = np.asarray(u, dtype=float)
    fu = evaluate(f, u)
    f1 = evaluate(diff(f), u)
    return np.column_stack([f1, u * f1, fu, np.ones_like(u)])


def eqf3_nullspace(f, domain: DomainInterval = DEFAULT_DOMAIN, m: int = 12,
                   samples=None) -> NullspaceReport:
    """Numerical nullspace of the sampled symmetry constraint.

    Columns are equilibrated before the SVD; singular values below
    ``RANK_TOL * sigma_max`` count as zero.
    """
    if samples is None:
        if m < 8:
            raise ValueError("need at least 8 sample points")
        samples = domain.chebyshev(m)
    samples = np.asarray(samples, dtype=float)
    if len(np.unique(samples)) != len(samples):
        raise DegenerateSampling("sample points are not distinct")
    A = eqf3_matrix(f, samples)
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    _, s, vt = np.linalg.svd(A / scale)
    tol = RANK_TOL * s[0] if s[0] > 0 else 0.0
    rank = int(np.sum(s > tol))
    null = vt[rank:] / scale
    if len(null):
        q, _ = np.linalg.qr(null.T)
        null = q.T
    resid = np.array([np.max(np.abs(A @ v)) for v in null])
    return NullspaceReport(samples, s, rank, 4 - rank, null, resid)


# -------------------------------------------------------------- classification

def _solve_in_span(basis: np.ndarray, constraints: dict) -> np.ndarray:
    """Vector in the row span of ``basis`` with prescribed components."""
    idx = list(constraints)
    target = np.array([constraints[i] for i in idx], dtype=float)
    coef, *_ = np.linalg.lstsq(basis[:, idx].T, target, rcond=None)
    v = coef @ basis
    v[np.abs(v) <= 1e-12 * np.max(np.abs(v))] = 0.0
    return v


# Normalisations for the extra generators, in (c, d, 2b, a1) indices.
_NORMALISATION = {
    "B1": ({2: 2.0, 0: 0.0, 1: 0.0}, {1: 1.0, 0: 0.0, 2: 0.0}, {0: 1.0, 1: 0.0, 2: 0.0}),
    "B2": ({2: -2.0, 0: 0.0}, {0: 1.0, 2: 0.0}),
    "B3_POWER": ({2: -2.0},),
    "B3_EXP": ({2: -2.0},),
    "B3_LOG": ({1: 1.0},),
    "A": (),
}


def _canonical_generators(tag: str, p: dict) -> list:
    if tag == "B1":
        return [SymmetryGenerator(a1=-2 * p["f0"], b=1.0), SymmetryGenerator(d=1.0),
                SymmetryGenerator(c=1.0)]
    if tag == "B2":
        return [SymmetryGenerator(a1=2 * p["f0"], b=-1.0, d=2.0),
                SymmetryGenerator(a1=-p["f1"], c=1.0)]
    if tag == "B3_POWER":
        al = p["alpha"]
        return [SymmetryGenerator(a1=2 * p["f0"], b=-1.0, c=-2 * p["u0"] / al, d=2 / al)]
    if tag == "B3_EXP":
        return [SymmetryGenerator(a1=2 * p["f0"], b=-1.0, c=2 / p["alpha"])]
    if tag == "B3_LOG":
        return [SymmetryGenerator(a1=-p["alpha"], c=-p["u0"], d=1.0)]
    return []


def generators(result: ClassificationResult) -> list:
    """Translations plus the extra generators of the classified case.

    When the result carries its nullspace the extra generators are taken
    from it (so a1 is always consistent with the constraint); otherwise
    they are built from the canonical parameters.
    """
    base = [TIME_TRANSLATION, SPACE_TRANSLATION]
    if result.nullspace is not None and len(result.nullspace):
        extra = [SymmetryGenerator.from_nullvector(_solve_in_span(result.nullspace, c))
                 for c in _NORMALISATION[result.case_tag]]
    else:
        extra = _canonical_generators(result.case_tag, result.params)
    return base + extra


def verify_generator(f, g: SymmetryGenerator, domain: DomainInterval = DEFAULT_DOMAIN,
                     m: int = 100) -> float:
    """max |(c + d u) f'(u) + 2 b f(u) + a1| over m Chebyshev samples."""
    f = as_expr(f)
    u = domain.chebyshev(m)
    defect = (g.c + g.d * u) * evaluate(diff(f), u) + 2 * g.b * evaluate(f, u) + g.a1
    return float(np.max(np.abs(defect)))


def defect_scale(f, domain: DomainInterval = DEFAULT_DOMAIN, m: int = 100) -> float:
    f = as_expr(f)
    u = domain.chebyshev(m)
    return 1.0 + float(np.max(np.abs(evaluate(f, u)))) + float(np.max(np.abs(evaluate(diff(f), u))))


def _real_power(x, alpha):
    n = round(alpha)
    if abs(alpha - n) <= ZERO_TOL * max(1.0, abs(alpha)):
        return x ** float(n)
    return np.abs(x) ** alpha


def _fit_amplitude(g, r):
    return float(np.dot(g, r) / np.dot(g, g))


def _subcase(f: Expr, v: np.ndarray, u: np.ndarray) -> tuple:
    c, d, two_b, a1 = v
    tiny = ZERO_TOL * np.linalg.norm(v)
    has_b, has_d, has_c = abs(two_b) > tiny, abs(d) > tiny, abs(c) > tiny
    fu = evaluate(f, u)
    if has_b and has_d:
        alpha = -two_b / d
        u0 = -c / d
        f0 = -a1 / two_b
        lam = _fit_amplitude(_real_power(u - u0, alpha), fu - f0)
        return "B3_POWER", {"f0": f0, "lam": lam, "alpha": alpha, "u0": u0}
    if has_b and has_c:
        rate = -two_b / c
        f0 = -a1 / two_b
        lam = _fit_amplitude(np.exp(rate * u), fu - f0)
        return "B3_EXP", {"f0": f0, "lam": lam, "alpha": rate, "rate": rate}
    if has_d:
        alpha = -a1 / d
        u0 = -c / d
        f0 = float(np.mean(fu - alpha * np.log(np.abs(u - u0))))
        return "B3_LOG", {"f0": f0, "alpha": alpha, "u0": u0}
    raise InconsistentNullity(f"nullspace direction {v.tolist()} forces f'' = 0")


def classify(f, domain: DomainInterval = DEFAULT_DOMAIN, m: int = 12) -> ClassificationResult:
    """Assign f to exactly one of the six cases A, B1, B2, B3_POWER, B3_EXP, B3_LOG."""
    f = as_expr(f)
    u = domain.chebyshev(m)
    fu = evaluate(f, u)
    f1 = evaluate(diff(f), u)
    f2 = evaluate(diff(f, 2), u)
    notes = []
    if not domain.contains_origin:
        notes.append(f"domain [{domain.lo:g}, {domain.hi:g}] excludes u = 0; "
                     "classified on the given interval")

    sup = lambda a: float(np.max(np.abs(a)))  # noqa: E731
    report = eqf3_nullspace(f, samples=u)
    if sup(f1) <= FLAT_TOL * (1 + sup(fu)):
        tag, params, expected = "B1", {"f0": float(np.mean(fu))}, 3
        notes.append("infinite-dimensional family v(x,t) d/du exists for every "
                     "solution of v_t = f0 v_x + v_xxx")
    elif sup(f2) <= FLAT_TOL * (1 + sup(fu) + sup(f1)):
        f1_, f0_ = np.polyfit(u, fu, 1)
        tag, params, expected = "B2", {"f0": float(f0_), "f1": float(f1_)}, 2
    else:
        other = eqf3_nullspace(f, samples=domain.shifted().chebyshev(m))
        if other.nullity != report.nullity:
            raise InconsistentNullity(
                f"nullity {report.nullity} on primary samples but {other.nullity} on shifted samples")
        if report.nullity >= 2:
            raise InconsistentNullity(
                f"nullity {report.nullity} although f'' does not vanish")
        if report.nullity == 0:
            tag, params, expected = "A", {}, 0
        else:
            tag, params = _subcase(f, report.basis[0], u)
            expected = 1
    if report.nullity != expected:
        raise InconsistentNullity(f"case {tag} expects nullity {expected}, found {report.nullity}")

    params = {k: float(v) for k, v in params.items()}
    draft = ClassificationResult(tag, params, report.nullity, (), tuple(notes), report.basis)
    return ClassificationResult(tag, params, report.nullity, tuple(generators(draft)),
                                tuple(notes), report.basis)
