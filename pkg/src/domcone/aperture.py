"""Convex bodies of symmetric matrices and the body cone aperture.

A body is a finite generator ensemble; with ``rot_closed=True`` it
stands for the convex hull of all rotations of the generators, which is
every body the operator catalog needs.  The aperture ``alpha`` is the
minimum of ``tr A / lambda_n(A)`` over the body; its dual exponent p
satisfies ``(alpha - 1)(p - 1) = n - 1``.  The dominative operator with
that exponent is minimal for the body's support function:
``c * F_p <= G`` with ``c`` the trace of the minimizing generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import operators
from .errors import (
    ApertureInconsistencyError,
    InvalidBodyError,
    PreconditionError,
)
from .operators import eval_dominative, eval_support, num_to_json
from .sampling import goe_matrix, make_rng, random_orthogonal
from .symmat import SymMatrix, eigvals_sym

#: Generators must be positive semidefinite within this tolerance.
PSD_TOL = 1e-10

#: Uniform lower bound on generator traces, certifying 0 is not in the body.
TRACE_FLOOR = 1e-8


@dataclass(frozen=True)
class ConvexBody:
    """Finite generator ensemble for a compact convex body in S(n).

    With ``rot_closed`` the body is conv(rot{generators}); otherwise it is
    the plain convex hull of the generators.  Generators must be positive
    semidefinite (the support function is then elliptic) with trace at
    least ``TRACE_FLOOR`` (bounding the body away from the origin).
    """

    n: int
    generators: tuple[SymMatrix, ...]
    rot_closed: bool = True

    def __post_init__(self):
        if not self.generators:
            raise InvalidBodyError("a convex body needs at least one generator")
        object.__setattr__(self, "generators", tuple(self.generators))
        for i, g in enumerate(self.generators):
            if g.n != self.n:
                raise InvalidBodyError(
                    f"generator {i} has dimension {g.n}, body has {self.n}"
                )
            ev = eigvals_sym(g)
            if ev[0] < -PSD_TOL:
                raise InvalidBodyError(
                    f"generator {i} is not positive semidefinite "
                    f"(lambda_1 = {ev[0]:g})"
                )
            if float(np.trace(g.a)) < TRACE_FLOOR:
                raise InvalidBodyError(
                    f"generator {i} has trace below {TRACE_FLOOR:g}; "
                    "the body is not certified away from 0"
                )

    @cached_property
    def generator_spectra(self) -> np.ndarray:
        """(num_generators, n) array of ascending generator eigenvalues."""
        return np.vstack([eigvals_sym(g) for g in self.generators])

    def scaled(self, c: float) -> "ConvexBody":
        if c <= 0.0:
            raise InvalidBodyError("bodies scale by positive factors only")
        return ConvexBody(
            n=self.n,
            generators=tuple(g * c for g in self.generators),
            rot_closed=self.rot_closed,
        )

    def summary(self) -> str:
        closure = "rot-closed" if self.rot_closed else "plain hull"
        return f"{len(self.generators)} generator(s) in S({self.n}), {closure}"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "generators": [g.to_dict() for g in self.generators],
            "rot_closed": self.rot_closed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvexBody":
        try:
            n = int(d["n"])
            gens = tuple(SymMatrix.from_dict(g) for g in d["generators"])
            rot = bool(d.get("rot_closed", True))
        except (KeyError, TypeError) as exc:
            raise InvalidBodyError(f"malformed body object: {exc}") from exc
        return cls(n=n, generators=gens, rot_closed=rot)


def dominative_body(n: int, p: float) -> ConvexBody:
    """Body whose support function is the dominative operator with exponent p.

    A single generator suffices under rotation closure:
    ``(I + (p-2) e_n e_n^T) / (n+p-2)`` for finite p, the rank-one
    projector ``e_n e_n^T`` at p = inf.
    """
    if math.isnan(p) or p < 2.0:
        raise PreconditionError(f"exponent p must lie in [2, inf], got {p}")
    spike = np.zeros((n, n))
    spike[n - 1, n - 1] = 1.0
    if p == math.inf:
        gen = SymMatrix(spike)
    else:
        gen = SymMatrix((np.eye(n) + (p - 2.0) * spike) / (n + p - 2.0))
    return ConvexBody(n=n, generators=(gen,), rot_closed=True)


def pucci_body(n: int, lam: float, Lam: float) -> ConvexBody:
    """Extreme diagonal generators of the uniform-ellipticity body.

    The n+1 generators ``diag(Lam, ..., Lam, lam, ..., lam)`` with k
    leading copies of Lam, k = 0..n; rotation closure recovers the full
    set {lam*I <= A <= Lam*I}.
    """
    if not 0.0 < lam <= Lam:
        raise PreconditionError(f"require 0 < lam <= Lam, got lam={lam}, Lam={Lam}")
    gens = []
    for k in range(n + 1):
        gens.append(SymMatrix.diag([Lam] * k + [lam] * (n - k)))
    return ConvexBody(n=n, generators=tuple(gens), rot_closed=True)


@dataclass(frozen=True)
class ApertureResult:
    """Aperture alpha in [1, n], dual exponent p, and the minimality data:
    index of the minimizing generator and the bound constant c = tr A'."""

    alpha: float
    p: float
    argmin_index: int
    c: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": num_to_json(self.p),
            "argmin_index": self.argmin_index,
            "c": self.c,
        }


def _spike_matrix(n: int, a: float) -> SymMatrix:
    """diag(a-1, -1, ..., -1): the ray on which the support root equals alpha."""
    d = np.full(n, -1.0)
    d[0] = a - 1.0
    return SymMatrix.diag(d)


def _alpha_by_support_root(body: ConvexBody, tol: float) -> float:
    """Bisection root of a -> G(diag(a-1, -1, ..., -1)) on [1, n].

    The map is a maximum of affine functions of a with strictly positive
    slopes (the generators' top eigenvalues), hence strictly increasing
    with the aperture as its unique root.
    """
    n = body.n

    def g(a: float) -> float:
        return eval_support(_spike_matrix(n, a), body)

    lo, hi = 1.0, float(n)
    if g(lo) >= 0.0:
        return lo
    if g(hi) <= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generator_aperture_lower_bound(body: ConvexBody) -> float:
    """Minimum of tr A / lambda_n(A) over the generators.

    For rotation-closed bodies this equals the aperture; for plain hulls
    it is only a lower bound and is reported as such, never as alpha.
    """
    spectra = body.generator_spectra
    ratios = spectra.sum(axis=1) / spectra[:, -1]
    return float(np.min(ratios))


def body_cone_aperture(
    body: ConvexBody,
    *,
    path_tol: float = 1e-8,
    bisect_tol: float = 1e-12,
) -> ApertureResult:
    """Aperture of a rotation-closed body, computed two independent ways.

    Path one minimizes tr/lambda_n over the generators directly; path two
    bisects the support function along the ``diag(a-1, -1, ..., -1)`` ray.
    Disagreement beyond ``path_tol`` raises, since it signals a body whose
    ``rot_closed`` flag is dishonest (or broken generator data).

    Ties in the generator minimum break to the lowest index; ``c`` is the
    trace of that generator.
    """
    if not body.rot_closed:
        raise PreconditionError(
            "the aperture is exact only for rotation-closed bodies; "
            "use generator_aperture_lower_bound for plain hulls"
        )
    spectra = body.generator_spectra
    traces = spectra.sum(axis=1)
    ratios = traces / spectra[:, -1]
    idx = int(np.argmin(ratios))  # argmin resolves ties to the lowest index
    alpha = float(ratios[idx])

    alpha_root = _alpha_by_support_root(body, bisect_tol)
    if abs(alpha - alpha_root) > path_tol:
        raise ApertureInconsistencyError(
            f"aperture paths disagree: generator minimum {alpha!r} vs "
            f"support-root {alpha_root!r}; the body likely violates its "
            f"rot_closed semantics"
        )

    n = body.n
    if alpha - 1.0 <= 1e-12:
        p = math.inf
    else:
        p = (n + alpha - 2.0) / (alpha - 1.0)
    return ApertureResult(alpha=alpha, p=p, argmin_index=idx, c=float(traces[idx]))


# ---------------------------------------------------------------------------
# Minimality of the dominative operator


@dataclass
class MinimalBoundReport:
    body_summary: str
    alpha: float
    p: float
    c: float
    samples: int
    probes: int
    violations: list = field(default_factory=list)
    worst_margin: float = math.inf
    tightest: dict | None = None
    sharpness_gap: float = math.inf

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "body": self.body_summary,
            "alpha": self.alpha,
            "p": num_to_json(self.p),
            "c": self.c,
            "samples": self.samples,
            "probes": self.probes,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "tightest": self.tightest,
            "sharpness_gap": self.sharpness_gap,
            "passed": self.passed,
        }


_BOUND_RADII = (0.5, 1.0, 2.0, 10.0)


def minimal_bound_check(
    body: ConvexBody,
    samples: int = 2000,
    seed: int = 0,
    tol: float = 1e-9,
    sharpness_probes: int = 8,
) -> MinimalBoundReport:
    """Sample the minimality bound c * F_p(X) <= G(X) for the body's aperture.

    Records the worst margin ``G(X) - c F_p(X)`` and the tightest sampled X.
    ``sharpness_probes`` targeted evaluations at rotations of
    ``diag(alpha-1, -1, ..., -1)`` witness equality (both sides vanish
    there), tracked as ``sharpness_gap``.
    """
    ap = body_cone_aperture(body)
    rng = make_rng(seed)
    report = MinimalBoundReport(
        body_summary=body.summary(),
        alpha=ap.alpha,
        p=ap.p,
        c=ap.c,
        samples=samples,
        probes=sharpness_probes,
    )

    def record(x: SymMatrix) -> None:
        lhs = ap.c * eval_dominative(x, ap.p)
        rhs = eval_support(x, body)
        margin = rhs - lhs
        if margin < -tol:
            report.violations.append(
                {"margin": margin, "X": x.to_dict(), "lhs": lhs, "rhs": rhs}
            )
        if margin < report.worst_margin:
            report.worst_margin = margin
            report.tightest = x.to_dict()
        report.sharpness_gap = min(report.sharpness_gap, abs(margin))

    for i in range(samples):
        record(goe_matrix(rng, body.n, radius=_BOUND_RADII[i % len(_BOUND_RADII)]))

    spike = _spike_matrix(body.n, ap.alpha)
    for _ in range(sharpness_probes):
        q = random_orthogonal(rng, body.n)
        record(SymMatrix(q.T @ spike.a @ q))
    return report


# ---------------------------------------------------------------------------
# Constructive permutation decomposition


def dominative_weights(n: int, p: float) -> np.ndarray:
    """Eigenvalue vector of the dominative body's generator:
    ``[1, ..., 1, p-1] / (n+p-2)``, or the last basis vector at p = inf."""
    if math.isnan(p) or p < 2.0:
        raise PreconditionError(f"exponent p must lie in [2, inf], got {p}")
    if p == math.inf:
        w = np.zeros(n)
        w[-1] = 1.0
        return w
    w = np.ones(n)
    w[-1] = p - 1.0
    return w / (n + p - 2.0)


@dataclass(frozen=True)
class PermutationDecomposition:
    """Convex combination of entry permutations of a vector.

    ``permutations[k]`` is an index tuple sigma with ``(P a)[i] = a[sigma[i]]``;
    every permutation fixes the last index and the weights are uniform
    ``1/(n-1)`` by construction.
    """

    weights: tuple[float, ...]
    permutations: tuple[tuple[int, ...], ...]

    def reconstruct(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        out = np.zeros_like(a)
        for w, perm in zip(self.weights, self.permutations):
            out += w * a[list(perm)]
        return out

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "permutations": [list(p) for p in self.permutations],
        }


_HYP_TOL = 1e-12


def perc_weights(a, p_vec) -> PermutationDecomposition:
    """Constructive witness that ``p_vec`` lies in the permutation hull of ``a``.

    Requires ``sum(a) == sum(p_vec)`` and ``a[-1] == p_vec[-1]`` (each to
    1e-12), with ``p_vec`` a dominative weight vector: first n-1 entries
    equal, summing to one, last entry at least the rest.  The output puts
    weight 1/(n-1) on the powers of the cyclic permutation of the first
    n-1 entries; averaging those cycles flattens the head of ``a`` onto
    the head of ``p_vec`` exactly.
    """
    a = np.asarray(a, dtype=float)
    p_vec = np.asarray(p_vec, dtype=float)
    if a.ndim != 1 or p_vec.shape != a.shape or a.size < 2:
        raise PreconditionError(
            f"expected two equal-length vectors of size >= 2, "
            f"got shapes {a.shape} and {p_vec.shape}"
        )
    n = a.size
    sum_a, sum_p = float(a.sum()), float(p_vec.sum())
    if abs(sum_a - sum_p) > _HYP_TOL:
        raise PreconditionError(
            f"sum equality failed: sum(a) = {sum_a!r} but sum(p) = {sum_p!r}"
        )
    if abs(a[-1] - p_vec[-1]) > _HYP_TOL:
        raise PreconditionError(
            f"last-entry equality failed: a[n] = {a[-1]!r} but p[n] = {p_vec[-1]!r}"
        )
    head = p_vec[:-1]
    if head.size and np.max(np.abs(head - head[0])) > _HYP_TOL:
        raise PreconditionError(
            "target vector is not a dominative weight vector: "
            "its first n-1 entries are not equal"
        )
    if abs(sum_p - 1.0) > _HYP_TOL or p_vec[0] < -_HYP_TOL or p_vec[-1] < p_vec[0] - _HYP_TOL:
        raise PreconditionError(
            "target vector is not a dominative weight vector "
            "(needs sum 1, nonnegative equal head, dominant last entry)"
        )

    # sigma for the block permutation: cyclic shift on the first n-1 indices,
    # last index fixed.
    base = np.empty(n, dtype=int)
    base[0] = n - 2
    base[1 : n - 1] = np.arange(0, n - 2)
    base[n - 1] = n - 1

    perms = []
    cur = base.copy()
    for _ in range(n - 1):
        perms.append(tuple(int(i) for i in cur))
        cur = base[cur]
    weights = tuple([1.0 / (n - 1)] * (n - 1))
    return PermutationDecomposition(weights=weights, permutations=tuple(perms))
