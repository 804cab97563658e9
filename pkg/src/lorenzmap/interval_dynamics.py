"""Interval orbits, the continuity index, and covering evidence.

For a nonempty open interval ``U`` the continuity index ``N(U)`` is the
smallest ``n`` with ``c`` in ``f^n(U)``; equivalently the largest ``n``
such that ``f^n`` is continuous on ``U``, and there is a unique ``z`` in
``U`` with ``f^{N(U)}(z) = c``.

Closed intervals are iterated in the doubled-point convention: the
image of ``[x, c]`` is ``[f(x), b]`` and the image of ``[c, y]`` is
``[a, f(y)]``, so unions of iterates are finite unions of closed
intervals.  That convention is what makes covering statements exact,
such as the first iterates of the interval between the flanking
periodic points tiling the whole domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .numerics import Interval, Scalar, format_scalar
from .maps import LorenzMap, IntervalDoesNotStraddleC


class CapExceeded(Exception):
    """An iteration guard was hit before the sought event occurred."""


DEFAULT_HIT_CAP = 10_000
DEFAULT_COVER_CAP = 1_000


def _require_rational_map(m: LorenzMap, what: str) -> None:
    if not m.is_rational():
        raise TypeError(f"{what} requires an all-rational map")


@dataclass(frozen=True)
class IntervalUnion:
    """A normalized finite union of closed intervals.

    Components are sorted, pairwise disjoint, and maximal: touching
    closed components are merged.
    """

    components: tuple

    @classmethod
    def from_pairs(cls, pairs) -> "IntervalUnion":
        pairs = sorted((lo, hi) for lo, hi in pairs)
        merged: list[list] = []
        for lo, hi in pairs:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        return cls(tuple(Interval.closed(lo, hi) for lo, hi in merged))

    def pairs(self) -> list:
        return [(comp.lo, comp.hi) for comp in self.components]

    def contains(self, x: Scalar) -> bool:
        return any(comp.lo <= x <= comp.hi for comp in self.components)

    def component_containing(self, x: Scalar) -> Optional[Interval]:
        for comp in self.components:
            if comp.lo <= x <= comp.hi:
                return comp
        return None

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.from_pairs(self.pairs() + other.pairs())

    def covers(self, other: "IntervalUnion") -> bool:
        return all(
            any(c.lo <= lo and hi <= c.hi for c in self.components)
            for lo, hi in other.pairs()
        )

    def equals_interval(self, lo: Scalar, hi: Scalar) -> bool:
        return len(self.components) == 1 and (
            self.components[0].lo == lo and self.components[0].hi == hi
        )

    def __str__(self) -> str:
        return " U ".join(str(comp) for comp in self.components) or "(empty)"


@dataclass(frozen=True)
class HittingResult:
    """The continuity index ``n`` and the unique ``z`` with ``f^n(z) = c``."""

    n: int
    z: Scalar


def closed_image_pairs(m: LorenzMap, lo: Scalar, hi: Scalar) -> list:
    """Image of a closed interval, split at the discontinuity.

    Endpoints equal to ``c`` take the one-sided limit determined by the
    interval they bound (``[x, c]`` uses ``c-``, ``[c, y]`` uses ``c+``).
    """
    c = m.c
    if lo < c < hi:
        return [
            (m.left.value(lo, m.precision_bits), m.b),
            (m.a, m.right.value(hi, m.precision_bits)),
        ]
    if hi <= c:
        return [(m.left.value(lo, m.precision_bits), m.left.value(hi, m.precision_bits))]
    return [(m.right.value(lo, m.precision_bits), m.right.value(hi, m.precision_bits))]


def image_union(m: LorenzMap, union: IntervalUnion) -> IntervalUnion:
    out = []
    for lo, hi in union.pairs():
        out.extend(closed_image_pairs(m, lo, hi))
    return IntervalUnion.from_pairs(out)


def hitting_index(
    m: LorenzMap, U: Interval, cap: int = DEFAULT_HIT_CAP
) -> HittingResult:
    """Smallest ``n`` with ``c`` in ``f^n(U)`` for a nonempty open ``U``.

    The point ``z`` is recovered by pulling ``c`` back through the
    branches recorded along the way; ``f^{n-1}`` is continuous and
    strictly increasing on ``U``, so ``z`` is unique.
    """
    _require_rational_map(m, "hitting_index")
    lo, hi = U.lo, U.hi
    if not (m.a <= lo < hi <= m.b):
        raise ValueError(f"{U} is not a nonempty open subinterval of the domain")
    c = m.c
    if lo < c < hi:
        return HittingResult(0, c)
    branches = []
    for n in range(1, cap + 1):
        if hi <= c:
            branch = m.left
            branches.append(branch)
        else:
            branch = m.right
            branches.append(branch)
        lo = branch.value(lo, m.precision_bits)
        hi = branch.value(hi, m.precision_bits)
        if lo < c < hi:
            z = c
            for branch in reversed(branches):
                z = branch.solve(z, m.precision_bits)
                if z is None:
                    raise AssertionError("pullback of the hit left the branch")
            return HittingResult(n, z)
    raise CapExceeded(f"no hit of c within {cap} iterates of {U}")


def interval_orbit(m: LorenzMap, J: Interval, return_times) -> IntervalUnion:
    """The forward orbit of ``J = [u, v]`` as a finite closed union.

    With ``(ell, r)`` the return times of the renormalization on ``J``,
    the orbit is the union of the first ``ell`` iterates of ``[u, c]``
    and the first ``r`` iterates of ``[c, v]`` (sided images at ``c``);
    the result is forward invariant.
    """
    _require_rational_map(m, "interval_orbit")
    u, v = J.lo, J.hi
    if not (u < m.c < v):
        raise IntervalDoesNotStraddleC(f"{J} does not straddle c")
    ell, r = return_times
    if ell < 1 or r < 1:
        raise ValueError("return times must be positive")
    parts = []
    for start, steps in (((u, m.c), ell), ((m.c, v), r)):
        lo, hi = start
        parts.append((lo, hi))
        for _ in range(steps - 1):
            images = closed_image_pairs(m, lo, hi)
            if len(images) != 1:
                raise ValueError(
                    "interval image crossed the discontinuity: return times "
                    "do not match the first-return structure"
                )
            lo, hi = images[0]
            parts.append((lo, hi))
    return IntervalUnion.from_pairs(parts)


def covering_check(m: LorenzMap, J: Interval, steps: int) -> bool:
    """Whether the first ``steps`` iterates of ``J`` tile the whole domain."""
    _require_rational_map(m, "covering_check")
    frontier = IntervalUnion.from_pairs([(J.lo, J.hi)])
    total = frontier
    if total.equals_interval(m.a, m.b):
        return True
    for _ in range(steps):
        frontier = image_union(m, frontier)
        total = total.union(frontier)
        if total.equals_interval(m.a, m.b):
            return True
    return False


@dataclass(frozen=True)
class CoverageResult:
    """Outcome of a bounded locally-eventually-onto probe.

    A covered result is a certificate (least ``steps`` whose cumulative
    images tile the domain); not covering within the cap is inconclusive
    evidence only.
    """

    covered: bool
    steps: Optional[int]
    cap: int

    def __str__(self) -> str:
        if self.covered:
            return f"Covered({self.steps})"
        return f"NotCoveredWithin({self.cap})"


def leo_evidence(m: LorenzMap, U: Interval, cap: int = DEFAULT_COVER_CAP) -> CoverageResult:
    """Least ``n <= cap`` with the first ``n`` iterates of ``U`` covering.

    Covering is decided on the closure of the cumulative union (the
    doubled-point convention the covering statements use).
    """
    _require_rational_map(m, "leo_evidence")
    frontier = IntervalUnion.from_pairs([(U.lo, U.hi)])
    total = frontier
    if total.equals_interval(m.a, m.b):
        return CoverageResult(True, 0, cap)
    for n in range(1, cap + 1):
        frontier = image_union(m, frontier)
        total = total.union(frontier)
        if total.equals_interval(m.a, m.b):
            return CoverageResult(True, n, cap)
    return CoverageResult(False, None, cap)


def format_union(union: IntervalUnion) -> list:
    return [[format_scalar(c.lo), format_scalar(c.hi)] for c in union.components]
