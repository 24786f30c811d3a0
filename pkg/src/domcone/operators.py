"""Catalog of degenerate elliptic operators F: S(n) -> extended reals.

Every operator here is spectrally defined or reduces to one by a shift
or a congruence.  Evaluation is exact per formula; sublevel-set
membership is ``F(X) <= tol``.  Composite specs unwrap so that the
sublevel set of ``Conjugated(F, B)`` is B^T Theta(F) B and the sublevel
set of ``Shifted(F, X0)`` is Theta(F) + {X0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

import numpy as np

from .errors import DimensionMismatchError, InputError, PreconditionError
from .sampling import goe_matrix, make_rng
from .symmat import (
    LOEWNER_TOL,
    InvertibleMap,
    SymMatrix,
    congruence,
    eigvals_sym,
    inf_norm,
    inner,
)

if TYPE_CHECKING:  # pragma: no cover
    from .aperture import ConvexBody

P_INF = math.inf


def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 2.0:
        raise PreconditionError(f"exponent p must lie in [2, inf], got {p}")
    return p


def eval_dominative(x: SymMatrix, p: float) -> float:
    """Normalized dominative operator.

    ``(tr X + (p-2) lambda_n(X)) / (n+p-2)`` for finite p, and the largest
    eigenvalue at p = inf.  Normalized so that F(X + mI) = F(X) + m.
    """
    p = _check_p(p)
    ev = eigvals_sym(x)
    if p == P_INF:
        return float(ev[-1])
    return float((np.trace(x.a) + (p - 2.0) * ev[-1]) / (x.n + p - 2.0))


def eval_pucci(x: SymMatrix, lam: float, Lam: float) -> float:
    """Maximal uniformly elliptic operator with ellipticity constants [lam, Lam].

    Equals ``Lam * sum(positive eigenvalues) + lam * sum(negative eigenvalues)``.
    """
    if not 0.0 < lam <= Lam:
        raise PreconditionError(f"require 0 < lam <= Lam, got lam={lam}, Lam={Lam}")
    ev = eigvals_sym(x)
    pos = ev[ev > 0.0].sum()
    neg = ev[ev < 0.0].sum()
    return float(Lam * pos + lam * neg)


def eval_support(x: SymMatrix, body) -> float:
    """Support function of a convex body of symmetric matrices.

    For rotation-closed bodies (``body.rot_closed``) the maximum of
    tr(Q A Q^T X) over orthogonal Q is the ascending-sorted eigenvalue
    dot product, so the support value is the maximum of that pairing
    over the generators.  For plain generator hulls it is the maximum
    direct pairing ``<A, X>``.
    """
    if x.n != body.n:
        raise DimensionMismatchError(
            f"matrix dimension {x.n} does not match body dimension {body.n}"
        )
    if body.rot_closed:
        xe = eigvals_sym(x)
        return float(np.max(body.generator_spectra @ xe))
    return max(inner(a, x) for a in body.generators)


def eval_example(x: SymMatrix) -> float:
    """Two-dimensional model equation with an unbounded-trace sublevel set.

    Value ``l1 + l2 - 2*sqrt(1 + l2) + 2`` on ordered eigenvalues
    l1 <= l2 when l2 >= -1; -inf below that edge, which is the unique
    extension keeping the sublevel set downward closed.
    """
    if x.n != 2:
        raise DimensionMismatchError(f"example operator is defined on S(2), got n={x.n}")
    l1, l2 = eigvals_sym(x)
    if l2 < -1.0:
        return -math.inf
    return float(l1 + l2 - 2.0 * math.sqrt(max(0.0, 1.0 + l2)) + 2.0)


# ---------------------------------------------------------------------------
# Operator specs


@dataclass(frozen=True)
class DominativeP:
    n: int
    p: float

    def __post_init__(self):
        _check_p(self.p)

    def value(self, x: SymMatrix) -> float:
        _check_op_dim(self, x)
        return eval_dominative(x, self.p)


@dataclass(frozen=True)
class Pucci:
    n: int
    lam: float
    Lam: float

    def __post_init__(self):
        if not 0.0 < self.lam <= self.Lam:
            raise InputError(
                f"require 0 < lam <= Lam, got lam={self.lam}, Lam={self.Lam}"
            )

    def value(self, x: SymMatrix) -> float:
        _check_op_dim(self, x)
        return eval_pucci(x, self.lam, self.Lam)


@dataclass(frozen=True)
class LinearTrace:
    """Affine half-space operator ``<A, X> - m`` with A >= 0, tr A > 0."""

    A: SymMatrix
    m: float

    def __post_init__(self):
        ev = eigvals_sym(self.A)
        if ev[0] < -LOEWNER_TOL:
            raise InputError(
                f"linear operator matrix must be positive semidefinite "
                f"(lambda_1 = {ev[0]:g})"
            )
        if float(np.trace(self.A.a)) <= 0.0:
            raise InputError("linear operator matrix must have positive trace")

    @property
    def n(self) -> int:
        return self.A.n

    def value(self, x: SymMatrix) -> float:
        _check_op_dim(self, x)
        return inner(self.A, x) - self.m


@dataclass(frozen=True)
class EnsembleSupport:
    body: "ConvexBody"

    @property
    def n(self) -> int:
        return self.body.n

    def value(self, x: SymMatrix) -> float:
        return eval_support(x, self.body)


@dataclass(frozen=True)
class ExampleEq:
    n: int = 2

    def __post_init__(self):
        if self.n != 2:
            raise InputError(f"example operator is defined on S(2), got n={self.n}")

    def value(self, x: SymMatrix) -> float:
        return eval_example(x)


@dataclass(frozen=True)
class Shifted:
    inner: "OperatorSpec"
    X0: SymMatrix

    def __post_init__(self):
        if operator_dim(self.inner) != self.X0.n:
            raise DimensionMismatchError(
                "shift matrix dimension does not match inner operator"
            )

    @property
    def n(self) -> int:
        return self.X0.n

    def value(self, x: SymMatrix) -> float:
        _check_op_dim(self, x)
        return evaluate(self.inner, x - self.X0)


@dataclass(frozen=True)
class Conjugated:
    inner: "OperatorSpec"
    B: InvertibleMap

    def __post_init__(self):
        if operator_dim(self.inner) != self.B.n:
            raise DimensionMismatchError(
                "conjugating map dimension does not match inner operator"
            )

    @property
    def n(self) -> int:
        return self.B.n

    def value(self, x: SymMatrix) -> float:
        _check_op_dim(self, x)
        # F(B^-T X B^-1): sublevel set becomes B^T Theta B.
        return evaluate(self.inner, congruence(x, self.B.B_inv))


OperatorSpec = Union[
    DominativeP, Pucci, LinearTrace, EnsembleSupport, ExampleEq, Shifted, Conjugated
]


def operator_dim(spec: OperatorSpec) -> int:
    return spec.n


def _check_op_dim(spec, x: SymMatrix) -> None:
    if x.n != spec.n:
        raise DimensionMismatchError(
            f"matrix dimension {x.n} does not match operator dimension {spec.n}"
        )


def evaluate(spec: OperatorSpec, x: SymMatrix) -> float:
    """Evaluate an operator spec at ``x``; may return -inf."""
    return spec.value(x)


@dataclass(frozen=True)
class EvalResult:
    """Evaluation outcome; ``boundary_distance_hint`` is the signed distance
    to the sublevel-set boundary along the identity line when the operator
    itself is that distance (the dominative family)."""

    value: float
    boundary_distance_hint: float | None = None

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    def to_dict(self) -> dict:
        return {
            "value": num_to_json(self.value),
            "boundary_distance_hint": (
                None
                if self.boundary_distance_hint is None
                else num_to_json(self.boundary_distance_hint)
            ),
        }


def evaluate_result(spec: OperatorSpec, x: SymMatrix) -> EvalResult:
    v = evaluate(spec, x)
    hint = v if isinstance(spec, DominativeP) else None
    return EvalResult(value=v, boundary_distance_hint=hint)


def sublevel_member(spec: OperatorSpec, x: SymMatrix, tol: float = 0.0) -> bool:
    """Membership in the sublevel set {X | F(X) <= tol}."""
    return evaluate(spec, x) <= tol


# ---------------------------------------------------------------------------
# JSON wire format


def num_to_json(x: float):
    """Render a float for strict JSON; infinities become strings."""
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return float(x)


def num_from_json(v) -> float:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
        try:
            return float(v)
        except ValueError as exc:
            raise InputError(f"cannot parse number {v!r}") from exc
    return float(v)


def spec_to_dict(spec: OperatorSpec) -> dict:
    if isinstance(spec, DominativeP):
        return {"type": "dominative", "n": spec.n, "p": num_to_json(spec.p)}
    if isinstance(spec, Pucci):
        return {"type": "pucci", "n": spec.n, "lam": spec.lam, "Lam": spec.Lam}
    if isinstance(spec, LinearTrace):
        return {"type": "linear", "A": spec.A.to_dict(), "m": spec.m}
    if isinstance(spec, EnsembleSupport):
        return {"type": "ensemble", "body": spec.body.to_dict()}
    if isinstance(spec, ExampleEq):
        return {"type": "example", "n": 2}
    if isinstance(spec, Shifted):
        return {"type": "shifted", "inner": spec_to_dict(spec.inner), "X0": spec.X0.to_dict()}
    if isinstance(spec, Conjugated):
        return {"type": "conjugated", "inner": spec_to_dict(spec.inner), "B": spec.B.to_dict()}
    raise InputError(f"unknown operator spec {spec!r}")


def spec_from_dict(d: dict) -> OperatorSpec:
    from .aperture import ConvexBody  # deferred: avoids a module cycle

    try:
        kind = d["type"]
    except (KeyError, TypeError) as exc:
        raise InputError("operator spec object must carry a 'type' field") from exc
    try:
        if kind == "dominative":
            return DominativeP(n=int(d["n"]), p=num_from_json(d["p"]))
        if kind == "pucci":
            return Pucci(n=int(d["n"]), lam=float(d["lam"]), Lam=float(d["Lam"]))
        if kind == "linear":
            return LinearTrace(A=SymMatrix.from_dict(d["A"]), m=float(d["m"]))
        if kind == "ensemble":
            return EnsembleSupport(body=ConvexBody.from_dict(d["body"]))
        if kind == "example":
            return ExampleEq(n=int(d.get("n", 2)))
        if kind == "shifted":
            return Shifted(inner=spec_from_dict(d["inner"]), X0=SymMatrix.from_dict(d["X0"]))
        if kind == "conjugated":
            return Conjugated(
                inner=spec_from_dict(d["inner"]), B=InvertibleMap.from_dict(d["B"])
            )
    except KeyError as exc:
        raise InputError(f"operator spec of type {kind!r} is missing field {exc}") from exc
    raise InputError(f"unknown operator type {kind!r}")


# ---------------------------------------------------------------------------
# Sublevel-set nesting


@dataclass
class NestingReport:
    """Sampled evidence for the nesting of dominative sublevel sets."""

    p: float
    p_prime: float
    samples: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "p": num_to_json(self.p),
            "p_prime": num_to_json(self.p_prime),
            "samples": self.samples,
            "violations": self.violations,
            "passed": self.passed,
        }


_NESTING_RADII = (0.5, 1.0, 2.0, 10.0)


def check_nesting(
    p: float,
    p_prime: float,
    samples: int = 500,
    seed: int = 0,
    n_values: tuple[int, ...] = (2, 3, 4, 5),
) -> NestingReport:
    """Sample the inclusion Theta_p <= Theta_p' (p' < p) and the claim that
    the two boundaries meet only at the origin.

    Violations recorded: a sampled X with F_p(X) <= 0 but F_p'(X) > 1e-12,
    or a sampled X on both boundaries (|F_p| + |F_p'| <= 1e-9) with
    infinity norm above 1e-6 times its sampling radius.
    """
    p = _check_p(p)
    p_prime = _check_p(p_prime)
    if not p_prime < p:
        raise PreconditionError(f"require 2 <= p' < p <= inf, got p'={p_prime}, p={p}")
    rng = make_rng(seed)
    report = NestingReport(p=p, p_prime=p_prime, samples=samples)
    for i in range(samples):
        n = n_values[i % len(n_values)]
        radius = _NESTING_RADII[i % len(_NESTING_RADII)]
        x = goe_matrix(rng, n, radius=radius)
        fp = eval_dominative(x, p)
        fpp = eval_dominative(x, p_prime)
        if fp <= 0.0 and fpp > 1e-12:
            report.violations.append(
                {"kind": "inclusion", "F_p": fp, "F_p_prime": fpp, "X": x.to_dict()}
            )
        if abs(fp) + abs(fpp) <= 1e-9 and inf_norm(x) > 1e-6 * radius:
            report.violations.append(
                {
                    "kind": "boundary-intersection",
                    "F_p": fp,
                    "F_p_prime": fpp,
                    "norm": inf_norm(x),
                    "X": x.to_dict(),
                }
            )
    return report
