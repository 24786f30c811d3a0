"""Radial fundamental solutions and Sobolev-threshold verification.

The profile attached to exponent p in dimension n is

    w(x) = -((p-1)/(p-n)) |x|^((p-n)/(p-1))   for p != n finite,
           -ln|x|                              at p = n,
           -|x|                                at p = inf,

with w(0) = +inf for p <= n.  Its Hessian diagonalizes to
|x|^(-alpha) * diag(alpha-1, -1, ..., -1) with (alpha-1)(p-1) = n-1,
which every rotation-invariant sublinear elliptic operator of body cone
aperture p annihilates away from the origin.  The weak gradient lies in
L^q_loc exactly for q below n(p-1)/(n-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .aperture import ConvexBody, body_cone_aperture
from .errors import PreconditionError
from .operators import (
    DominativeP,
    EnsembleSupport,
    OperatorSpec,
    Pucci,
    eval_dominative,
    eval_pucci,
    eval_support,
    evaluate,
    num_to_json,
)
from .sampling import log_uniform, make_rng, random_unit_vector
from .symmat import SymMatrix


@dataclass(frozen=True)
class FundamentalSolution:
    """Radial fundamental solution for dimension n and exponent p in [2, inf]."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 2:
            raise PreconditionError(f"dimension must be at least 2, got {self.n}")
        if math.isnan(self.p) or self.p < 2.0:
            raise PreconditionError(f"exponent p must lie in [2, inf], got {self.p}")

    @property
    def alpha(self) -> float:
        """Dual homogeneity degree: (alpha - 1)(p - 1) = n - 1; 1 at p = inf."""
        if self.p == math.inf:
            return 1.0
        return (self.n + self.p - 2.0) / (self.p - 1.0)


def w_value(fs: FundamentalSolution, x) -> float:
    """Value at a point; +inf at the origin when p <= n."""
    r = float(np.linalg.norm(np.asarray(x, dtype=float)))
    n, p = fs.n, fs.p
    if p == math.inf:
        return -r
    if r == 0.0:
        return math.inf if p <= n else 0.0
    if p == n:
        return -math.log(r)
    return -(p - 1.0) / (p - n) * r ** ((p - n) / (p - 1.0))


def w_gradient(fs: FundamentalSolution, x) -> np.ndarray:
    """Gradient -|x|^(-(n-1)/(p-1)) * x/|x| (unit inward slope at p = inf)."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise PreconditionError("the gradient is undefined at the origin")
    xhat = x / r
    if fs.p == math.inf:
        return -xhat
    return -(r ** (-(fs.n - 1.0) / (fs.p - 1.0))) * xhat


def w_hessian(fs: FundamentalSolution, x) -> SymMatrix:
    """Hessian |x|^(-alpha) ((alpha-1) xx^T/|x|^2 - (I - xx^T/|x|^2)).

    Eigenvalues: (alpha-1)|x|^(-alpha) once (along x), -|x|^(-alpha) with
    multiplicity n-1.
    """
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise PreconditionError("the Hessian is undefined at the origin")
    xhat = x / r
    proj = np.outer(xhat, xhat)
    alpha = fs.alpha
    h = r ** (-alpha) * ((alpha - 1.0) * proj - (np.eye(fs.n) - proj))
    return SymMatrix(h)


def spike_direction_matrix(n: int, alpha: float) -> SymMatrix:
    """diag(alpha - 1, -1, ..., -1), the Hessian's shape at unit radius."""
    d = np.full(n, -1.0)
    d[0] = alpha - 1.0
    return SymMatrix.diag(d)


# ---------------------------------------------------------------------------
# Radial calculus


@dataclass(frozen=True)
class RadialProfile:
    """Radial function by its first two derivatives; ``c`` tags members of
    the model-equation family."""

    n: int
    u: Callable[[float], float]
    du: Callable[[float], float]
    d2u: Callable[[float], float]
    c: float | None = None


def w_radial_profile(fs: FundamentalSolution) -> RadialProfile:
    n, p = fs.n, fs.p
    if p == math.inf:
        return RadialProfile(n=n, u=lambda r: -r, du=lambda r: -1.0, d2u=lambda r: 0.0)
    exp_grad = -(n - 1.0) / (p - 1.0)
    alpha = fs.alpha

    def u(r):
        return w_value(fs, [r] + [0.0] * (n - 1))

    return RadialProfile(
        n=n,
        u=u,
        du=lambda r: -(r ** exp_grad),
        d2u=lambda r: (alpha - 1.0) * r ** (-alpha),
    )


def example_radial_profile(c: float) -> RadialProfile:
    """Singular radial family of the model equation:
    ``-r^2/2 + 2 c r - c^2 ln r`` for c >= 1, on the unit disc."""
    if c < 1.0:
        raise PreconditionError(f"the radial family needs c >= 1, got {c}")
    return RadialProfile(
        n=2,
        u=lambda r: -0.5 * r * r + 2.0 * c * r - c * c * math.log(r),
        du=lambda r: -r + 2.0 * c - c * c / r,
        d2u=lambda r: -1.0 + c * c / (r * r),
        c=c,
    )


def radial_hessian_eigs(profile: RadialProfile, r: float) -> np.ndarray:
    """Ascending Hessian eigenvalues of a radial function at radius r:
    u''(r) once and u'(r)/r with multiplicity n-1."""
    if r <= 0.0:
        raise PreconditionError(f"radius must be positive, got {r}")
    eigs = np.full(profile.n, profile.du(r) / r)
    eigs[0] = profile.d2u(r)
    return np.sort(eigs)


# ---------------------------------------------------------------------------
# Annihilation


@dataclass
class AnnihilationReport:
    operator_summary: str
    n: int
    p: float
    alpha: float
    samples: int
    max_scaled_residual: float = 0.0
    max_scaling_law_error: float = 0.0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "operator": self.operator_summary,
            "n": self.n,
            "p": num_to_json(self.p),
            "alpha": self.alpha,
            "samples": self.samples,
            "max_scaled_residual": self.max_scaled_residual,
            "max_scaling_law_error": self.max_scaling_law_error,
            "violations": self.violations,
            "passed": self.passed,
        }


def operator_aperture(op) -> float:
    """Body cone aperture exponent of a sublinear rotation-invariant operator
    or body; raises for operators outside that class."""
    if isinstance(op, ConvexBody):
        return body_cone_aperture(op).p
    if isinstance(op, DominativeP):
        return op.p
    if isinstance(op, Pucci):
        return op.Lam / op.lam + 1.0
    if isinstance(op, EnsembleSupport):
        return body_cone_aperture(op.body).p
    raise PreconditionError(
        f"{type(op).__name__} has no body cone aperture: the notion applies "
        "to sublinear rotation-invariant elliptic operators only"
    )


def _sublinear_eval(op, x: SymMatrix) -> float:
    if isinstance(op, ConvexBody):
        return eval_support(x, op)
    return evaluate(op, x)


def _op_dim(op) -> int:
    return op.n


def _op_summary(op) -> str:
    if isinstance(op, ConvexBody):
        return f"support function of {op.summary()}"
    return type(op).__name__


def verify_annihilation(
    op,
    fs: FundamentalSolution,
    sample_count: int = 500,
    seed: int = 0,
    tol: float = 1e-9,
    require_aperture_match: bool = True,
) -> AnnihilationReport:
    """Check that the operator vanishes on the fundamental solution's Hessian.

    Samples |x| log-uniformly in [1e-2, 1e2] over random directions and
    verifies both the scaled residual |G(Hess w(x))| * |x|^alpha <= tol and
    the homogeneity scaling law G(Hess w(x)) = |x|^(-alpha) G(Lambda_alpha).

    The operator's body cone aperture must equal fs.p — by definition the
    aperture is the unique exponent whose profile the operator annihilates.
    Passing ``require_aperture_match=False`` skips that gate so a mismatch's
    nonzero residual can be demonstrated.
    """
    if _op_dim(op) != fs.n:
        raise PreconditionError(
            f"operator dimension {_op_dim(op)} does not match solution dimension {fs.n}"
        )
    p_op = operator_aperture(op)
    if require_aperture_match:
        both_inf = p_op == math.inf and fs.p == math.inf
        if not both_inf and abs(p_op - fs.p) > 1e-9:
            raise PreconditionError(
                f"aperture mismatch: operator has body cone aperture {p_op!r} "
                f"but the solution is built for exponent {fs.p!r}"
            )

    rng = make_rng(seed)
    alpha = fs.alpha
    g_spike = _sublinear_eval(op, spike_direction_matrix(fs.n, alpha))
    report = AnnihilationReport(
        operator_summary=_op_summary(op),
        n=fs.n,
        p=fs.p,
        alpha=alpha,
        samples=sample_count,
    )
    for _ in range(sample_count):
        r = log_uniform(rng, 1e-2, 1e2)
        x = r * random_unit_vector(rng, fs.n)
        g = _sublinear_eval(op, w_hessian(fs, x))
        scaled = abs(g) * r**alpha
        report.max_scaled_residual = max(report.max_scaled_residual, scaled)
        if scaled > tol:
            report.violations.append({"x": x.tolist(), "residual": g, "scaled": scaled})
        law_err = abs(g - r ** (-alpha) * g_spike) * r**alpha
        report.max_scaling_law_error = max(report.max_scaling_law_error, law_err)
    return report


# ---------------------------------------------------------------------------
# Sobolev integrals


def surface_measure(n: int) -> float:
    """Surface measure of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    if n < 1:
        raise PreconditionError(f"dimension must be positive, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def sobolev_threshold(n: int, p: float) -> float:
    """Critical gradient exponent q* = n (p-1) / (n-1)."""
    if p == math.inf:
        return math.inf
    return n * (p - 1.0) / (n - 1.0)


def _radial_exponent(n: int, p: float, q: float) -> float:
    # integrand |grad w|^q r^(n-1) = r^(n-1 - q(n-1)/(p-1))
    return (n - 1.0) - q * (n - 1.0) / (p - 1.0)


def sobolev_integral(n: int, p: float, q: float, eps: float) -> float:
    """Integral of |grad w|^q over the annulus eps < |x| < 1, analytically.

    ``surface_measure(n) * int_eps^1 r^e dr`` with
    ``e = n-1 - q(n-1)/(p-1)``; the antiderivative switches to the log
    branch exactly at e = -1, the divergence threshold q = q*.
    """
    if not 0.0 < eps < 1.0:
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    if q <= 0.0:
        raise PreconditionError(f"gradient exponent q must be positive, got {q}")
    if math.isnan(p) or p < 2.0 or p == math.inf:
        raise PreconditionError(f"exponent p must lie in [2, inf), got {p}")
    e = _radial_exponent(n, p, q)
    omega = surface_measure(n)
    if e == -1.0:
        return omega * math.log(1.0 / eps)
    return omega * (1.0 - eps ** (e + 1.0)) / (e + 1.0)


def sobolev_integral_quadrature(n: int, p: float, q: float, eps: float) -> float:
    """Adaptive-quadrature cross-check of :func:`sobolev_integral`.

    Integrates in log-radius (r = e^u turns the power integrand into a
    smooth exponential), so the near-singular endpoint costs nothing.
    """
    if not 0.0 < eps < 1.0:
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    e = _radial_exponent(n, p, q)
    val, _ = quad(lambda u: math.exp((e + 1.0) * u), math.log(eps), 0.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return surface_measure(n) * val


def sobolev_diverges(n: int, p: float, q: float) -> bool:
    """True when the integral diverges as eps -> 0, i.e. q >= q*."""
    return _radial_exponent(n, p, q) + 1.0 <= 0.0


# ---------------------------------------------------------------------------
# The model radial family


@dataclass
class RadialCheckReport:
    c: float
    r_values: list[float]
    max_residual: float = 0.0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "r_values": self.r_values,
            "max_residual": self.max_residual,
            "violations": self.violations,
            "passed": self.passed,
        }


def example_radial_check(c: float, r_grid, tol: float = 1e-9) -> RadialCheckReport:
    """Verify the model equation vanishes on its radial family.

    At each r in (0, 1) the Hessian eigenvalues are u'(r)/r and
    u''(r) = -1 + c^2/r^2 (the larger branch since r < 1 <= c), and the
    operator value must vanish to ``tol``.
    """
    from .operators import eval_example  # local: keeps module import order flat

    profile = example_radial_profile(c)
    r_values = [float(r) for r in r_grid]
    if any(not 0.0 < r < 1.0 for r in r_values):
        raise PreconditionError("the radial grid must lie inside (0, 1)")
    report = RadialCheckReport(c=c, r_values=r_values)
    for r in r_values:
        eigs = radial_hessian_eigs(profile, r)
        residual = abs(eval_example(SymMatrix.diag(eigs)))
        report.max_residual = max(report.max_residual, residual)
        if residual > tol:
            report.violations.append({"r": r, "residual": residual})
        # the top eigenvalue is the pure second derivative on this family
        if abs(eigs[-1] - profile.d2u(r)) > tol * max(1.0, abs(eigs[-1])):
            report.violations.append({"r": r, "top_eig_mismatch": float(eigs[-1])})
    return report


# ---------------------------------------------------------------------------
# Grid supersolution check


@dataclass
class GridCheckReport:
    points_checked: int
    max_value: float = -math.inf
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "points_checked": self.points_checked,
            "max_value": num_to_json(self.max_value),
            "violations": self.violations,
            "passed": self.passed,
        }


def viscosity_grid_check(
    op: OperatorSpec,
    hessian_field: Callable[[np.ndarray], SymMatrix],
    grid,
    tol: float,
) -> GridCheckReport:
    """Pointwise supersolution check: F(Hess u(x)) <= tol at every grid point.

    For twice-differentiable u this is exactly the supersolution property of
    the equation F(Hess u) = 0 on the grid.
    """
    points = [np.asarray(x, dtype=float) for x in grid]
    report = GridCheckReport(points_checked=len(points))
    for x in points:
        v = evaluate(op, hessian_field(x))
        report.max_value = max(report.max_value, v)
        if v > tol:
            report.violations.append({"x": x.tolist(), "value": v})
    return report


def quadratic_shift_field(
    fs: FundamentalSolution, X0: SymMatrix
) -> Callable[[np.ndarray], SymMatrix]:
    """Hessian field of w + (1/2) x^T X0 x, the quadratic-shift supersolution."""
    if X0.n != fs.n:
        raise PreconditionError("shift matrix dimension does not match the solution")
    return lambda x: w_hessian(fs, x) + X0


def default_quadratic_shift(oracle, n: int) -> SymMatrix:
    """Default shift: the origin's boundary projection ``0 - dist(0) * I``."""
    from .acdo import acdo_eval

    return SymMatrix.identity(n) * (-acdo_eval(oracle, SymMatrix.zeros(n)))
