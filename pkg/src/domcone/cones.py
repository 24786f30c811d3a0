"""Asymptotic-cone sampling and the cone-inclusion test.

The asymptotic cone of a set Theta collects the directions of its
boundary at infinity.  There is no finite certificate for a limit
object, so the inclusion test ac(B^T Theta B) <= Theta_p is approximated
by projecting random directions onto the boundary at growing radii and
tracking how fast the worst dominative value of the normalized boundary
directions decays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .acdo import ROOT_TOL, EllipticSetOracle, acdo_eval
from .aperture import dominative_body
from .errors import NonProperSetError, NumericalFailureError, PreconditionError
from .operators import eval_dominative, eval_support, num_to_json
from .sampling import goe_matrix, make_rng
from .symmat import InvertibleMap, SymMatrix, congruence, inf_norm

#: Default property tolerance for "numerically zero" worst values.
PROPERTY_TOL = 1e-8


def conjugate_oracle(oracle: EllipticSetOracle, B: InvertibleMap) -> EllipticSetOracle:
    """Oracle of the congruence image B^T Theta B.

    Membership of X in the image is membership of B^-T X B^-1 in Theta;
    ellipticity and properness survive the congruence.
    """
    inv = B.B_inv

    def member(x: SymMatrix) -> bool:
        return oracle.member(congruence(x, inv))

    conj = lambda w: None if w is None else congruence(w, B)
    return EllipticSetOracle(
        member=member,
        n=oracle.n,
        inside_witness=conj(oracle.inside_witness),
        outside_witness=conj(oracle.outside_witness),
        description=f"congruence image of ({oracle.description})",
    )


def shift_oracle(oracle: EllipticSetOracle, X0: SymMatrix) -> EllipticSetOracle:
    """Oracle of the translate Theta + {X0}."""

    def member(x: SymMatrix) -> bool:
        return oracle.member(x - X0)

    shift = lambda w: None if w is None else w + X0
    return EllipticSetOracle(
        member=member,
        n=oracle.n,
        inside_witness=shift(oracle.inside_witness),
        outside_witness=shift(oracle.outside_witness),
        description=f"translate of ({oracle.description})",
    )


@dataclass(frozen=True)
class ConeSample:
    """A boundary point at a given sampling radius and its normalized
    direction (infinity norm one)."""

    radius: float
    direction: SymMatrix
    raw_point: SymMatrix


def boundary_sample(
    oracle: EllipticSetOracle,
    R: float,
    count: int,
    seed: int = 0,
    root_tol: float = ROOT_TOL,
) -> list[ConeSample]:
    """Project random directions at radius R onto the set boundary.

    Each random unit direction D (GOE, infinity norm one) maps to the
    boundary point ``R*D - dist(R*D) * I`` via the signed distance;
    projections that collapse below R/10 in norm are discarded and
    resampled as degenerate.
    """
    rng = make_rng(seed)
    out: list[ConeSample] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count + 100:
            raise NumericalFailureError(
                "boundary sampling kept hitting degenerate projections",
                payload=oracle.description,
            )
        d = goe_matrix(rng, oracle.n, radius=1.0)
        probe = d * R
        raw = probe.shift(-acdo_eval(oracle, probe, root_tol))
        nrm = inf_norm(raw)
        if nrm < R / 10.0:
            continue
        out.append(ConeSample(radius=R, direction=raw * (1.0 / nrm), raw_point=raw))
    return out


@dataclass
class InclusionReport:
    """Decay record of the worst dominative value on boundary directions.

    ``trend_slope`` is the least-squares slope of log(worst) against
    log(R); the decay exponent is its negation.  Verdict rule:
    consistent when every worst value is below 5x the property tolerance
    or the fitted decay exponent is at least 0.25; violated when the fit
    is essentially flat (exponent below 0.1) yet the worst value at the
    largest radius clearly exceeds zero (10x the zero threshold);
    inconclusive otherwise.
    """

    p: float
    radii: list[float]
    worst_fp_per_radius: list[float]
    trend_slope: float
    verdict: str
    count: int
    seed: int
    q_interval: tuple[float, float]

    @property
    def decay_exponent(self) -> float:
        return -self.trend_slope

    def to_dict(self) -> dict:
        return {
            "p": num_to_json(self.p),
            "radii": self.radii,
            "worst_fp_per_radius": self.worst_fp_per_radius,
            "trend_slope": self.trend_slope,
            "decay_exponent": self.decay_exponent,
            "verdict": self.verdict,
            "count": self.count,
            "seed": self.seed,
            "q_interval": {
                "lo": self.q_interval[0],
                "hi": num_to_json(self.q_interval[1]),
                "conditional_on": "asymptotic-cone inclusion",
            },
        }


def _fit_slope(radii, worst, zero_thresh):
    pts = [
        (math.log(r), math.log(w))
        for r, w in zip(radii, worst)
        if w > zero_thresh
    ]
    if len(pts) < 2:
        return 0.0, False
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, True


def check_inclusion(
    oracle: EllipticSetOracle,
    B: InvertibleMap | None,
    p: float,
    radii,
    count: int = 300,
    seed: int = 0,
    root_tol: float = ROOT_TOL,
    property_tol: float = PROPERTY_TOL,
) -> InclusionReport:
    """Numerical evidence for ac(B^T Theta B) <= Theta_p.

    Requires at least three increasing radii spanning three decades.  The
    guaranteed Sobolev exponent interval (0, n(p-1)/(n-1)) is attached to
    the report, conditional on the inclusion actually holding.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise PreconditionError("radii must be at least three increasing values")
    if math.log10(radii[-1] / radii[0]) < 3.0 - 1e-9:
        raise PreconditionError("radii must span at least three decades")

    target = oracle if B is None else conjugate_oracle(oracle, B)
    worst = []
    for i, r in enumerate(radii):
        samples = boundary_sample(target, r, count, seed=seed + 7919 * i, root_tol=root_tol)
        worst.append(max(eval_dominative(s.direction, p) for s in samples))

    zero_thresh = 5.0 * property_tol
    slope, fitted = _fit_slope(radii, worst, zero_thresh)
    beta = -slope

    if all(w <= zero_thresh for w in worst) or not fitted:
        verdict = "consistent"
    elif beta >= 0.25:
        verdict = "consistent"
    elif beta < 0.1 and worst[-1] > 10.0 * zero_thresh:
        verdict = "violated"
    else:
        verdict = "inconclusive"

    n = oracle.n
    q_hi = math.inf if p == math.inf else n * (p - 1.0) / (n - 1.0)
    return InclusionReport(
        p=p,
        radii=radii,
        worst_fp_per_radius=worst,
        trend_slope=slope,
        verdict=verdict,
        count=count,
        seed=seed,
        q_interval=(0.0, q_hi),
    )


def sup_pairing_estimate(
    oracle: EllipticSetOracle,
    B: InvertibleMap | None,
    p_prime: float,
    samples: int = 200,
    seed: int = 0,
    radius: float = 1e4,
    root_tol: float = ROOT_TOL,
) -> float:
    """Sampled lower bound for the supremum of the dominative p' value
    over the congruence image of the set.

    Uses boundary samples at ``radius`` plus interior probes from the
    inside witness.  Returns -inf when the set is empty along the probed
    lines.  This is a lower bound only; finiteness of the true supremum
    is what the cone inclusion certifies.
    """
    target = oracle if B is None else conjugate_oracle(oracle, B)
    body = dominative_body(target.n, p_prime)
    points: list[SymMatrix] = []
    try:
        points.extend(
            s.raw_point for s in boundary_sample(target, radius, samples, seed, root_tol)
        )
    except NonProperSetError as exc:
        if exc.reason == "empty-line":
            return -math.inf
        raise
    if target.inside_witness is not None:
        w = target.inside_witness
        points.extend([w, w.shift(-1.0), w.shift(-10.0)])
    if not points:
        return -math.inf
    return max(eval_support(x, body) for x in points)


def recession_ray_check(
    oracle: EllipticSetOracle,
    samples: int = 50,
    seed: int = 0,
    t_values=(1.0, 1e2, 1e4),
    root_tol: float = ROOT_TOL,
) -> list[dict]:
    """Optional cross-check for sets the caller asserts convex: members stay
    members along rays X + t*Z for boundary directions Z at large radius
    (the recession-cone formulation).  Returns the list of ray failures."""
    if oracle.inside_witness is None:
        raise PreconditionError("recession ray check needs an inside witness")
    base = oracle.inside_witness
    failures = []
    for s in boundary_sample(oracle, 1e6, samples, seed, root_tol):
        for t in t_values:
            probe = base + s.direction * t
            # allow the boundary fuzz of the projection itself
            if not oracle.member(probe.shift(-10.0 * root_tol * t)):
                failures.append({"t": t, "direction": s.direction.to_dict()})
                break
    return failures
