"""Geometry of the dynamic capacity region.

The region of either supported channel family is a one-parameter family of
translated cones: the unit-resource cone (teleportation, super-dense
coding, entanglement distribution) attached to a corner that traces the
closed-form trade-off curve. Membership and supporting-hyperplane queries
therefore reduce to one-dimensional maximizations over the curve
parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .channel import KrausChannel
from .cqstate import EntropicTriple
from .entropy import Bits, binary_entropy
from .errors import ValidationError

CONE_TOL = 1e-12
SLACK_TOL = 1e-9


class RateTriple(NamedTuple):
    """Rates in bits per channel use; positive = generated, negative = consumed."""

    c: Bits
    q: Bits
    e: Bits


class WeightVector(NamedTuple):
    w_c: float
    w_q: float
    w_e: float


ENTANGLEMENT_DISTRIBUTION = RateTriple(0.0, -1.0, 1.0)
SUPER_DENSE_CODING = RateTriple(2.0, -1.0, -1.0)
TELEPORTATION = RateTriple(-2.0, 1.0, -1.0)


class UnitResourceCone:
    """Non-negative combinations of the three unit protocols.

    Generator matrix columns are (ED, SD, TP); its exact inverse turns a
    rate triple back into protocol coefficients, and membership is the
    three inverted inequalities C+2Q <= 0, Q+E <= 0, C+Q+E <= 0.
    """

    generators = (ENTANGLEMENT_DISTRIBUTION, SUPER_DENSE_CODING, TELEPORTATION)

    matrix = np.array(
        [
            [0.0, 2.0, -2.0],
            [-1.0, -1.0, 1.0],
            [1.0, -1.0, -1.0],
        ]
    )

    inverse = np.array(
        [
            [-0.5, -1.0, 0.0],
            [0.0, -0.5, -0.5],
            [-0.5, -0.5, -0.5],
        ]
    )

    @classmethod
    def combine(cls, alpha: float, beta: float, gamma: float) -> RateTriple:
        return RateTriple(*(cls.matrix @ np.array([alpha, beta, gamma])))

    @classmethod
    def decompose(cls, r: RateTriple) -> np.ndarray:
        return cls.inverse @ np.array(r)

    @classmethod
    def contains(cls, r: RateTriple, tol: float = CONE_TOL) -> bool:
        c, q, e = r
        return c + 2 * q <= tol and q + e <= tol and c + q + e <= tol


def gamma(nu: float, p: float) -> float:
    """Spectral parameter of the dephasing environment output on diag(nu, 1-nu)."""
    nu = float(nu)
    p = float(p)
    if not 0.0 <= nu <= 1.0:
        raise ValidationError(f"nu must lie in [0, 1], got {nu}")
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    radicand = 1.0 - 16.0 * (p / 2.0) * (1.0 - p / 2.0) * nu * (1.0 - nu)
    if radicand < 0.0:
        if radicand < -1e-12:
            raise ValidationError(f"radicand {radicand!r} unexpectedly negative")
        radicand = 0.0
    return 0.5 + 0.5 * math.sqrt(radicand)


def dephasing_bounds(nu: float, p: float) -> EntropicTriple:
    """Closed-form bound triple for the dephasing channel at curve parameter nu.

    nu ranges over [0, 1/2]; larger values are symmetric duplicates and are
    rejected rather than folded.
    """
    nu = float(nu)
    if not 0.0 <= nu <= 0.5:
        raise ValidationError(f"nu must lie in [0, 1/2], got {nu}")
    h_nu = binary_entropy(nu)
    h_gamma = binary_entropy(gamma(nu, p))
    return EntropicTriple(1.0 + h_nu - h_gamma, h_nu - h_gamma, 1.0 - h_gamma)


def erasure_bounds(p: float, eps: float) -> EntropicTriple:
    """Closed-form bound triple for the erasure channel at curve parameter p."""
    p = float(p)
    eps = float(eps)
    if not 0.0 <= p <= 0.5:
        raise ValidationError(f"p must lie in [0, 1/2], got {p}")
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"eps must lie in [0, 1], got {eps}")
    h = binary_entropy(p)
    return EntropicTriple(
        (1.0 - eps) * (1.0 + h),
        (1.0 - 2.0 * eps) * h,
        1.0 - eps - eps * h,
    )


@dataclass(frozen=True)
class BoundarySurface:
    """One-parameter closed-form boundary: bounds(t) for t in [0, 1/2]."""

    family: str
    noise: float
    param_name: str
    bounds: Callable[[float], EntropicTriple]

    @property
    def label(self) -> str:
        return f"{self.family} ({self.noise:g})"


def dephasing_surface(p: float) -> BoundarySurface:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"dephasing parameter must lie in [0, 1], got {p}")
    return BoundarySurface("dephasing", p, "nu", lambda nu: dephasing_bounds(nu, p))


def erasure_surface(eps: float) -> BoundarySurface:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"erasure parameter must lie in [0, 1], got {eps}")
    return BoundarySurface("erasure", eps, "p", lambda p: erasure_bounds(p, eps))


def surface_for_channel(ch: KrausChannel) -> BoundarySurface:
    """Closed-form surface for a channel built by dephasing() or erasure()."""
    label = ch.label or ""
    if label.startswith("dephasing:p="):
        return dephasing_surface(float(label.split("=", 1)[1]))
    if label.startswith("erasure:eps="):
        return erasure_surface(float(label.split("=", 1)[1]))
    raise ValidationError(
        "closed-form boundary surfaces exist only for dephasing and erasure channels"
    )


def cef_from_bounds(bounds: EntropicTriple) -> RateTriple:
    """Corner rate triple the bounds pin down: C = I(X;B), Q = I(A;B|X)/2,
    E = -I(A;E|X)/2, reconstructed through the linear identities."""
    c = bounds.cqe_bound - bounds.qe_bound
    q = 0.5 * (bounds.cq_bound - c)
    e = bounds.qe_bound - q
    return RateTriple(c, q, e)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12):
    """Golden-section maximization on [lo, hi]; returns (argmax, value)."""
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _grid_then_refine(f: Callable[[float], float], grid: int):
    """Best of an even grid over [0, 1/2], refined once around the winner."""
    if grid < 2:
        raise ValidationError(f"grid must have at least 2 points, got {grid}")
    ts = np.linspace(0.0, 0.5, grid)
    values = [f(t) for t in ts]
    best = int(np.argmax(values))
    lo = ts[max(best - 1, 0)]
    hi = ts[min(best + 1, grid - 1)]
    x, fx = _golden_max(f, float(lo), float(hi))
    if values[best] >= fx:
        return float(ts[best]), float(values[best])
    return float(x), float(fx)


@dataclass(frozen=True)
class MembershipResult:
    inside: bool
    witness: float
    slack: float


def in_region(r: RateTriple, surface: BoundarySurface, grid: int = 2049) -> MembershipResult:
    """Whether some curve parameter satisfies all three bounds for r.

    Points on the boundary count as inside (slack tolerance -1e-9).
    """
    c, q, e = r
    lhs = (c + 2.0 * q, q + e, c + q + e)

    def slack(t: float) -> float:
        b = surface.bounds(t)
        return min(b.cq_bound - lhs[0], b.qe_bound - lhs[1], b.cqe_bound - lhs[2])

    witness, best = _grid_then_refine(slack, grid)
    return MembershipResult(best >= -SLACK_TOL, witness, best)


@dataclass(frozen=True)
class HyperplaneResult:
    bounded: bool
    value: float | None = None
    argmax: float | None = None


def supporting_hyperplane(
    w: WeightVector, surface: BoundarySurface, grid: int = 2049
) -> HyperplaneResult:
    """Supporting-plane offset max w . (C,Q,E) over the region, or unbounded.

    Finite exactly when w has non-positive inner product with each unit
    cone generator; then the maximum is attained on the corner curve.
    """
    w = WeightVector(*w)
    for g in UnitResourceCone.generators:
        if w.w_c * g.c + w.w_q * g.q + w.w_e * g.e > CONE_TOL:
            return HyperplaneResult(bounded=False)

    def value(t: float) -> float:
        corner = cef_from_bounds(surface.bounds(t))
        return w.w_c * corner.c + w.w_q * corner.q + w.w_e * corner.e

    argmax, best = _grid_then_refine(value, grid)
    return HyperplaneResult(True, best, argmax)


@dataclass(frozen=True)
class BoundarySample:
    param: float
    bounds: EntropicTriple
    cef: RateTriple


def sample_boundary(surface: BoundarySurface, n: int) -> list[BoundarySample]:
    """n evenly spaced samples of the boundary curve over [0, 1/2]."""
    if n < 2:
        raise ValidationError(f"need at least 2 samples, got {n}")
    samples = []
    for t in np.linspace(0.0, 0.5, int(n)):
        b = surface.bounds(float(t))
        samples.append(BoundarySample(float(t), b, cef_from_bounds(b)))
    return samples


CSV_HEADER = "param,cq_bound,qe_bound,cqe_bound,cef_c,cef_q,cef_e"


def _fmt(x: float) -> str:
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return f"{x:.9g}"


def boundary_csv_rows(samples: list[BoundarySample]) -> list[str]:
    rows = [CSV_HEADER]
    for s in samples:
        cells = (
            s.param,
            s.bounds.cq_bound,
            s.bounds.qe_bound,
            s.bounds.cqe_bound,
            s.cef.c,
            s.cef.q,
            s.cef.e,
        )
        rows.append(",".join(_fmt(v) for v in cells))
    return rows


def write_boundary_csv(samples: list[BoundarySample], stream) -> None:
    for row in boundary_csv_rows(samples):
        stream.write(row + "\n")
