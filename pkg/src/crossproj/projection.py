"""Exact nearest-point projection onto the cross.

The cross is the set of orthogonal pairs C = {(x, y) : <x, y> = 0} in
R^n x R^n.  It is a nonconvex cone, so the nearest-point mapping is set
valued in general; it falls into exactly one of three cases for an input
(x0, y0):

* ``orthogonal``  -- <x0, y0> = 0: the input already lies in C and is its
  own (unique) projection.
* ``generic``     -- <x0, y0> != 0 and x0 != +-y0: the projection is the
  unique solution of the stationarity system x + lam*y = x0,
  y + lam*x = y0, with lam the small root of the multiplier quadratic
  q*lam^2 - S*lam + q = 0   (q = <x0, y0>, S = |x0|^2 + |y0|^2).
* ``degenerate``  -- <x0, y0> != 0 and x0 = +-y0: every unit direction u
  yields a nearest point (<u, x0> u, y0 - <u, y0> u), plus the base point
  (0, y0); the set has the cardinality of the unit sphere and is
  represented lazily.

Classification uses relative tolerance bands (exact trichotomies do not
survive floating point); the band widths live in :class:`Tolerances` and
every result carries its tag so callers can re-classify.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import CaseError, DimensionMismatch, DomainError
from .linalg import Pair, as_vector, block_solve, inner, norm, sphere_point, _require_unit

#: Below this width of |1 - lam^2| the direct quotient in the stationarity
#: solve loses precision and the subspace form of the candidate is used.
#: The quotient's membership residual grows like eps/|1 - lam^2|, so the
#: band must sit well above machine precision; 1e-6 keeps the residual of
#: the direct branch under 1e-10 while the subspace branch is exact in the
#: constraint by construction.
FALLBACK_BAND = 1e-6


class CaseTag(Enum):
    """Which branch of the projection trichotomy an input falls into."""

    ORTHOGONAL = "orthogonal"
    GENERIC = "generic"
    DEGENERATE_PLUS = "degenerate_plus"
    DEGENERATE_MINUS = "degenerate_minus"

    @property
    def is_degenerate(self) -> bool:
        return self in (CaseTag.DEGENERATE_PLUS, CaseTag.DEGENERATE_MINUS)


@dataclass(frozen=True)
class Tolerances:
    """Relative classification bands and the feasibility certificate scale.

    ``orth``: |<x0,y0>| <= orth * (1 + |x0||y0|) classifies as orthogonal.
    ``deg``:  min(|x0-y0|, |x0+y0|) <= deg * (|x0|+|y0|) classifies as
    degenerate (checked after the orthogonal band; precedence resolves the
    overlap at the origin).  ``membership`` scales feasibility checks:
    a pair counts as lying in the cross when
    |<x,y>| <= membership * (1 + |x0||y0|).
    """

    orth: float = 1e-12
    deg: float = 1e-12
    membership: float = 1e-9


DEFAULT_TOLS = Tolerances()


class LambdaPair(NamedTuple):
    """Both roots of the multiplier quadratic; their product is 1."""

    lambda_minus: float
    lambda_plus: float


@dataclass(frozen=True, eq=False)
class SingletonProjection:
    """Unique nearest point, its multiplier, and half the squared distance."""

    tag: CaseTag
    point: Pair
    lam: float
    half_dist_sq: float

    @property
    def is_set_valued(self) -> bool:
        return False

    def selections(self) -> list[Pair]:
        return [self.point]


@dataclass(frozen=True, eq=False)
class FamilyProjection:
    """Sphere-parametrized family of nearest points for x0 = +-y0.

    The full set is {base} | {(<u,x0> u, y0 - <u,y0> u) : |u| = 1}; it is
    stored lazily (materialize members with :meth:`member` or
    :func:`family_enumerate`).  ``canonical`` holds the two standard
    selections (0, y0) and (x0, 0), in that order.
    """

    tag: CaseTag
    x0: np.ndarray
    y0: np.ndarray
    base: Pair
    canonical: tuple[Pair, Pair]
    half_dist_sq: float

    @property
    def is_set_valued(self) -> bool:
        return True

    def member(self, u) -> Pair:
        return degenerate_family(self.x0, self.y0, u)

    def selections(self) -> list[Pair]:
        return list(self.canonical)


ProjectionResult = SingletonProjection | FamilyProjection


def _check_input(x0, y0) -> tuple[np.ndarray, np.ndarray]:
    x0 = as_vector(x0, "x0")
    y0 = as_vector(y0, "y0")
    if x0.size != y0.size:
        raise DimensionMismatch(f"x0 and y0 differ in dimension: {x0.size} != {y0.size}")
    return x0, y0


def membership(p: Pair, tol: float) -> bool:
    """Whether |<p.x, p.y>| <= tol."""
    if tol < 0.0:
        raise DomainError("membership tolerance must be nonnegative")
    return abs(inner(p.x, p.y)) <= tol


def membership_residual(p: Pair) -> float:
    """|<p.x, p.y>|, the amount by which a pair misses the cross."""
    return abs(inner(p.x, p.y))


def feasibility_scale(x0, y0, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Membership tolerance used for points produced from input (x0, y0)."""
    return tols.membership * (1.0 + norm(x0) * norm(y0))


def classify(x0, y0, tols: Tolerances = DEFAULT_TOLS) -> CaseTag:
    """Classify (x0, y0) into the projection trichotomy.

    Precedence: orthogonal band first (this absorbs the origin), then the
    degenerate bands, then generic.
    """
    x0, y0 = _check_input(x0, y0)
    q = inner(x0, y0)
    nx = norm(x0)
    ny = norm(y0)
    if abs(q) <= tols.orth * (1.0 + nx * ny):
        return CaseTag.ORTHOGONAL
    d_minus = norm(x0 - y0)
    d_plus = norm(x0 + y0)
    if min(d_minus, d_plus) <= tols.deg * (nx + ny):
        return CaseTag.DEGENERATE_PLUS if d_minus <= d_plus else CaseTag.DEGENERATE_MINUS
    return CaseTag.GENERIC


def solve_lambda(x0, y0) -> LambdaPair:
    """Both roots of q*lam^2 - S*lam + q = 0 for q = <x0,y0> != 0.

    The discriminant S^2 - 4 q^2 is evaluated in the factored form
    (|x0+y0| |x0-y0|)^2, and the small root through the product relation
    lambda_minus * lambda_plus = 1, i.e. lambda_minus = 2q / (S + P) with
    P = |x0+y0| |x0-y0|.  Both choices avoid the cancellation the textbook
    expressions suffer when q -> 0.
    """
    x0, y0 = _check_input(x0, y0)
    q = inner(x0, y0)
    if abs(q) <= DEFAULT_TOLS.orth * (1.0 + norm(x0) * norm(y0)):
        raise CaseError("multiplier quadratic undefined: <x0, y0> is (numerically) zero")
    s = float(np.dot(x0, x0) + np.dot(y0, y0))
    p = norm(x0 + y0) * norm(x0 - y0)
    return LambdaPair(2.0 * q / (s + p), (s + p) / (2.0 * q))


def candidate(lam: float, x0, y0) -> Pair:
    """Stationary pair for a given multiplier.

    Solves x + lam*y = x0 and y + lam*x = y0; for |lam| != 1 this has the
    unique solution ((x0 - lam*y0)/(1 - lam^2), (y0 - lam*x0)/(1 - lam^2)).
    """
    x0, y0 = _check_input(x0, y0)
    return block_solve(lam, Pair(x0, y0))


def objective(p: Pair, x0, y0) -> float:
    """Half squared displacement: 0.5*|p.x - x0|^2 + 0.5*|p.y - y0|^2."""
    x0, y0 = _check_input(x0, y0)
    dx = p.x - x0
    dy = p.y - y0
    return 0.5 * float(np.dot(dx, dx)) + 0.5 * float(np.dot(dy, dy))


def _family_member(x0: np.ndarray, y0: np.ndarray, u: np.ndarray) -> Pair:
    # (<u,x0> u, y0 - <u,y0> u); orthogonal by construction for unit u
    return Pair(float(np.dot(u, x0)) * u, y0 - float(np.dot(u, y0)) * u)


def project(x0, y0, tols: Tolerances = DEFAULT_TOLS) -> ProjectionResult:
    """Nearest point(s) of the cross to (x0, y0).

    Returns a :class:`SingletonProjection` in the orthogonal and generic
    cases and a :class:`FamilyProjection` in the degenerate case
    (x0 = +-y0 up to the classification band), where half the squared
    distance is (|x0|^2 + |y0|^2)/4 independently of the selected member.

    In the generic case the solution is the multiplier candidate at the
    small root lam; half the squared distance is lam*<x0,y0>/2, which also
    equals (S - |x0+y0||x0-y0|)/4.  When lam is within ``FALLBACK_BAND``
    of +-1 the quotient by 1 - lam^2 is ill-conditioned even though the
    projection itself is perfectly tame, so the point is assembled from
    the subspace pair (P_U x0, P_{U-perp} y0) with U spanned by
    x0 - lam*y0, which is where the solution direction lives.
    """
    x0, y0 = _check_input(x0, y0)
    tag = classify(x0, y0, tols)

    if tag is CaseTag.ORTHOGONAL:
        return SingletonProjection(tag, Pair(x0, y0), 0.0, 0.0)

    if tag is CaseTag.GENERIC:
        q = inner(x0, y0)
        s = float(np.dot(x0, x0) + np.dot(y0, y0))
        p = norm(x0 + y0) * norm(x0 - y0)
        lam = 2.0 * q / (s + p)
        half = 0.5 * lam * q
        den = 1.0 - lam * lam
        if abs(den) >= FALLBACK_BAND:
            point = block_solve(lam, Pair(x0, y0))
        else:
            w = x0 - lam * y0
            nw = norm(w)
            if nw <= 1e-12 * (norm(x0) + norm(y0)):
                # collinear with |x0| < |y0|: the solution has x = 0
                point = Pair(np.zeros_like(x0), y0)
            else:
                u = w / nw
                point = _family_member(x0, y0, u)
        return SingletonProjection(tag, point, lam, half)

    half = 0.25 * float(np.dot(x0, x0) + np.dot(y0, y0))
    zero = np.zeros_like(x0)
    base = Pair(zero, y0)
    return FamilyProjection(tag, x0, y0, base, (base, Pair(x0, zero)), half)


def distance_sq(x0, y0, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Squared distance from (x0, y0) to the cross."""
    return 2.0 * project(x0, y0, tols).half_dist_sq


def degenerate_family(x0, y0, u, tols: Tolerances = DEFAULT_TOLS) -> Pair:
    """One member of the set-valued projection for x0 = +-y0.

    For a unit direction u the member is (<u,x0> u, y0 - <u,y0> u); its
    displacement half-cost equals (|x0|^2 + |y0|^2)/4 for every u.
    """
    x0, y0 = _check_input(x0, y0)
    tag = classify(x0, y0, tols)
    if not tag.is_degenerate:
        raise CaseError(f"input is not degenerate (classified {tag.value})")
    u = as_vector(u, "u")
    if u.size != x0.size:
        raise DimensionMismatch(f"u has dimension {u.size}, expected {x0.size}")
    _require_unit(u)
    return _family_member(x0, y0, u)


def _angle_lattice(n: int, per_angle: int):
    """Lexicographic angle lattice for the sphere in R^n, n >= 2."""
    axes = [np.linspace(0.0, np.pi, per_angle)] * (n - 2)
    azimuth = np.linspace(0.0, 2.0 * np.pi, per_angle, endpoint=False)
    return itertools.product(*axes, azimuth)


def family_samples(
    x0, y0, count: int, mode: str = "grid", tols: Tolerances = DEFAULT_TOLS
) -> list[tuple[np.ndarray, Pair]]:
    """(direction, member) samples of the degenerate family.

    The base selection (0, y0) always comes first and carries the zero
    vector as its direction (it corresponds to the trivial subspace).
    Remaining members use sphere directions from a uniform angle lattice.
    In ``injective`` mode only directions with <u, x0> > 0 are emitted and
    exact duplicate points are dropped, so fewer than ``count`` samples
    may come back when the family is finite (n = 1).
    """
    x0, y0 = _check_input(x0, y0)
    if mode not in ("grid", "injective"):
        raise DomainError(f"unknown sampling mode {mode!r}")
    if count < 1:
        raise DomainError("count must be >= 1")
    tag = classify(x0, y0, tols)
    if not tag.is_degenerate:
        raise CaseError(f"input is not degenerate (classified {tag.value})")

    n = x0.size
    out: list[tuple[np.ndarray, Pair]] = [(np.zeros(n), Pair(np.zeros(n), y0))]
    if count == 1:
        return out

    def try_fill(directions) -> None:
        for u in directions:
            if len(out) == count:
                return
            point = _family_member(x0, y0, u)
            if mode == "injective":
                if float(np.dot(u, x0)) <= 0.0:
                    continue
                if any(
                    np.array_equal(point.x, q.x) and np.array_equal(point.y, q.y)
                    for _, q in out[1:]
                ):
                    continue
            out.append((u, point))

    if n == 1:
        try_fill([np.array([1.0]), np.array([-1.0])])
        return out

    per_angle = max(2, math.ceil((count - 1) ** (1.0 / (n - 1))))
    for _ in range(8):
        del out[1:]
        try_fill(sphere_point(1.0, th) for th in _angle_lattice(n, per_angle))
        if len(out) == count:
            break
        per_angle *= 2
    return out


def family_enumerate(
    x0, y0, count: int, mode: str = "grid", tols: Tolerances = DEFAULT_TOLS
) -> list[Pair]:
    """Members of the degenerate family: the base point plus sphere samples."""
    return [point for _, point in family_samples(x0, y0, count, mode, tols)]


def project_1d(x0: float, y0: float, tols: Tolerances = DEFAULT_TOLS) -> ProjectionResult:
    """Scalar fast path for n = 1, where the cross is the two coordinate axes.

    The nearest point is (0, y0) when |x0| < |y0| and (x0, 0) when
    |x0| > |y0|; for |x0| = |y0| != 0 both axes are equally close and the
    result is the two-point family {(x0, 0), (0, y0)}.  Agrees with
    :func:`project` applied to one-dimensional vectors, including the
    classification bands.
    """
    x0 = float(x0)
    y0 = float(y0)
    if not (math.isfinite(x0) and math.isfinite(y0)):
        raise DomainError("project_1d requires finite scalars")
    xv = np.array([x0])
    yv = np.array([y0])
    tag = classify(xv, yv, tols)
    if tag is CaseTag.ORTHOGONAL:
        return SingletonProjection(tag, Pair(xv, yv), 0.0, 0.0)
    if tag is CaseTag.GENERIC:
        if abs(x0) < abs(y0):
            point = Pair(np.array([0.0]), yv)
            lam = x0 / y0
            half = 0.5 * x0 * x0
        else:
            point = Pair(xv, np.array([0.0]))
            lam = y0 / x0
            half = 0.5 * y0 * y0
        return SingletonProjection(tag, point, lam, half)
    half = 0.25 * (x0 * x0 + y0 * y0)
    zero = np.array([0.0])
    base = Pair(zero, yv)
    return FamilyProjection(tag, xv, yv, base, (base, Pair(xv, zero)), half)
