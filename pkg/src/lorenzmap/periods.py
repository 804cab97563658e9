"""Fixed points, the minimal period, and the unique minimal periodic orbit.

For an expanding Lorenz map without fixed point the least period over
all periodic points is ``m + 2``, where ``m`` counts backward steps of
the discontinuity through its unique preimages until the chain enters
the two-preimage interval ``[f(a), f(b)]``.  The minimal-period orbit is
unique; it is found by decomposing the kappa-th iterate into its affine monotone
pieces (cylinders cut at preimages of ``c``) and solving the per-piece
fixed-point equation exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .numerics import Order, Scalar
from .maps import (
    LorenzMap,
    Side,
    SidedPoint,
    SideRequired,
    evaluate,
    inverse_images,
    iterate,
)

DEFAULT_BACKWARD_CAP = 10_000
DEFAULT_BRANCH_BUDGET = 200_000


class AmbiguousPreimage(Exception):
    """A backward-chain point had two preimages before entering [f(a), f(b)]."""


class UniquenessViolated(Exception):
    """More than one minimal-period orbit was found (broken input or bug)."""


class BranchBudgetExceeded(Exception):
    """Cylinder enumeration exceeded its configured budget."""


@dataclass(frozen=True)
class MinimalPeriodResult:
    """Minimal period ``kappa`` (None when undetermined at the cap).

    ``m`` is the number of backward steps of ``c`` before entering
    ``[f(a), f(b)]`` (None for fixed-point maps, where ``kappa = 1``),
    and ``backward_chain`` records ``c, c_1, ..., c_m``.
    """

    kappa: Optional[int]
    m: Optional[int]
    backward_chain: tuple

    @property
    def undetermined(self) -> bool:
        return self.kappa is None


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple  # SidedPoints sorted by value; side set only at c
    period: int
    itinerary: str  # letter k is L iff the k-th sorted point is left of c
    flank_left: Scalar  # largest orbit value left of c
    flank_right: Scalar  # smallest orbit value right of c

    def values(self) -> tuple:
        return tuple(p.x for p in self.points)


def fixed_points(m: LorenzMap) -> list:
    """All solutions of ``f(x) = x``, found per affine piece."""
    if not m.is_rational():
        raise TypeError("periodic-point analysis requires an all-rational map")
    out = []
    for branch, is_left in ((m.left, True), (m.right, False)):
        for lo, hi, s, t in branch.pieces():
            if s == 1:
                continue
            x = t / (1 - s)
            if not (lo <= x <= hi):
                continue
            # the discontinuity itself belongs to neither branch
            if m.cmp(x, m.c) is Order.EQUAL:
                continue
            if is_left and not (m.a <= x < m.c):
                continue
            if not is_left and not (m.c < x <= m.b):
                continue
            if x not in out:
                out.append(x)
    return sorted(out)


def minimal_period(m: LorenzMap, cap: int = DEFAULT_BACKWARD_CAP) -> MinimalPeriodResult:
    """Minimal period via the backward chain of the discontinuity.

    Fixed points short-circuit to ``kappa = 1``.  Otherwise ``c`` is
    pulled back through its unique preimages; the first entry of the
    chain into ``[f(a), f(b)]`` at step ``m`` gives ``kappa = m + 2``.
    Exceeding the cap leaves the period undetermined (an infinite
    minimal period is suspected but never asserted).
    """
    if fixed_points(m):
        return MinimalPeriodResult(1, None, ())
    fa = evaluate(m, SidedPoint(m.a))
    fb = evaluate(m, SidedPoint(m.b))
    chain = [m.c]
    x = m.c
    for i in range(cap + 1):
        if fa <= x <= fb:
            return MinimalPeriodResult(i + 2, i, tuple(chain))
        preimages = inverse_images(m, x)
        if len(preimages) != 1:
            raise AmbiguousPreimage(
                f"chain point {x} outside [f(a), f(b)] has {len(preimages)} preimages"
            )
        point = preimages[0][0]
        if point.side is not None:
            raise AmbiguousPreimage(
                "backward chain reached the discontinuity as a one-sided limit"
            )
        x = point.x
        chain.append(x)
    return MinimalPeriodResult(None, None, tuple(chain))


def _affine_cylinders(m: LorenzMap, depth: int, budget: int):
    """Yield ``(lo, hi, slope, intercept)`` with ``f^depth`` affine on ``[lo, hi]``.

    Cylinders are cut at preimages of the discontinuity and of internal
    piece breakpoints; endpoint values follow the one-sided limits of the
    cylinder they bound, so the affine data extends continuously to the
    closed cylinder.
    """
    if not m.is_rational():
        raise TypeError("cylinder enumeration requires an all-rational map")
    cuts = sorted(m.interior_cuts())
    c = m.c
    counter = [0]

    def pieces_for(y0: Scalar, y1: Scalar):
        branch = m.left if y1 <= c else m.right
        if y0 < c < y1:
            raise AssertionError("cylinder image straddles the discontinuity")
        for i in range(len(branch.slopes)):
            if branch.breakpoints[i] <= y0 and y1 <= branch.breakpoints[i + 1]:
                return branch.slopes[i], branch.intercepts[i]
        raise AssertionError("cylinder image escaped the branch pieces")

    def rec(lo, hi, s, t, d):
        counter[0] += 1
        if counter[0] > budget:
            raise BranchBudgetExceeded(
                f"more than {budget} cylinder pieces at depth {depth}"
            )
        if d == depth:
            yield (lo, hi, s, t)
            return
        y0, y1 = s * lo + t, s * hi + t
        inner = [x for x in cuts if y0 < x < y1]
        xs = [lo] + [(x - t) / s for x in inner] + [hi]
        ys = [y0] + inner + [y1]
        for k in range(len(xs) - 1):
            bs, bt = pieces_for(ys[k], ys[k + 1])
            yield from rec(xs[k], xs[k + 1], bs * s, bs * t + bt, d + 1)

    yield from rec(m.a, m.b, Fraction(1), Fraction(0), 0)


def _divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]


def _normalize_candidate(m: LorenzMap, x: Scalar, lo, hi, n: int) -> Optional[SidedPoint]:
    """Turn a per-cylinder affine solution into a verified periodic point.

    Interior solutions are plain points.  A solution sitting on a
    cylinder endpoint whose orbit hits ``c`` exactly is the one-sided
    point that endpoint stands for (``+`` at a left endpoint, ``-`` at
    a right endpoint).
    """
    try:
        if iterate(m, SidedPoint(x), n).x == x:
            return SidedPoint(x)
        return None
    except SideRequired:
        pass
    side = Side.PLUS if x == lo else Side.MINUS if x == hi else None
    if side is None:
        raise AssertionError("interior cylinder point hit the discontinuity")
    p = SidedPoint(x, side)
    if iterate(m, p, n).x == x:
        return p
    return None


def periodic_points(
    m: LorenzMap, n: int, budget: int = DEFAULT_BRANCH_BUDGET
) -> list:
    """All fixed points of ``f^n`` with their least periods, ascending.

    Each affine cylinder of ``f^n`` carries at most one solution because
    every slope exceeds 1.  Orbits through exact hits of ``c`` appear as
    one-sided points.
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    found: dict = {}
    for lo, hi, s, t in _affine_cylinders(m, n, budget):
        if s == 1:
            continue
        x = t / (1 - s)
        if not (lo <= x <= hi):
            continue
        p = _normalize_candidate(m, x, lo, hi, n)
        if p is None:
            continue
        key = (p.x, p.side)
        if key in found:
            continue
        least = next(d for d in _divisors(n) if iterate(m, p, d).x == p.x)
        found[key] = (p, least)
    return sorted(found.values(), key=lambda item: item[0].x)


def minimal_periodic_orbit(
    m: LorenzMap, kappa: int, budget: int = DEFAULT_BRANCH_BUDGET
) -> PeriodicOrbit:
    """The unique orbit of least period ``kappa`` (1 < kappa < ∞)."""
    if kappa <= 1:
        raise ValueError("the minimal orbit is defined for kappa > 1")
    candidates = periodic_points(m, kappa, budget)
    if any(least < kappa for _, least in candidates):
        raise ValueError(
            "points of period below kappa exist; kappa is not the minimal period"
        )
    orbits = []
    seen = set()
    for p, _ in candidates:
        if (p.x, p.side) in seen:
            continue
        orbit = [p]
        q = p
        for _ in range(kappa - 1):
            q = SidedPoint(evaluate(m, q), q.side)
            orbit.append(q)
        for q in orbit:
            seen.add((q.x, q.side))
        orbits.append(sorted(orbit, key=lambda sp: sp.x))
    if len(orbits) != 1:
        raise UniquenessViolated(
            f"expected one orbit of period {kappa}, found {len(orbits)}"
        )
    points = tuple(orbits[0])
    if len(points) != kappa:
        raise UniquenessViolated("orbit size does not match the period")

    def is_left(sp: SidedPoint) -> bool:
        if sp.x == m.c:
            return sp.side is Side.MINUS
        return sp.x < m.c

    itinerary = "".join("L" if is_left(sp) else "R" for sp in points)
    lefts = [sp.x for sp in points if is_left(sp)]
    rights = [sp.x for sp in points if not is_left(sp)]
    if not lefts or not rights:
        raise UniquenessViolated("orbit does not flank the discontinuity")
    return PeriodicOrbit(points, kappa, itinerary, max(lefts), min(rights))
