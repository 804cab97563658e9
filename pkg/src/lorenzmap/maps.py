"""Expanding Lorenz maps with piecewise-affine branches.

A Lorenz map on ``[a, b]`` has one discontinuity ``c``: it is strictly
increasing on ``[a, c)`` and on ``(c, b]``, with one-sided limits
``f(c-) = b`` and ``f(c+) = a``.  The discontinuity is treated as the
point pair ``c-`` / ``c+`` throughout: an orbit that lands exactly on
``c`` continues as the one-sided limit it was carried with.

Branches are piecewise affine with every slope > 1, which certifies the
expanding property (dense preimages of ``c``); maps that fail the slope
test are rejected by :func:`validate_map` rather than analyzed unsoundly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .numerics import (
    DEFAULT_PRECISION_BITS,
    CertifiedReal,
    Interval,
    Order,
    Scalar,
    cmp_certified,
    format_scalar,
    parse_scalar,
)

HALF = Fraction(1, 2)
ONE = Fraction(1)
ZERO = Fraction(0)


class SideRequired(Exception):
    """Evaluation at the discontinuity needs an explicit side."""


class IntervalDoesNotStraddleC(Exception):
    """The interval must contain the discontinuity in its interior."""


class Side(enum.Enum):
    MINUS = "-"
    PLUS = "+"


class BranchLabel(enum.Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True)
class SidedPoint:
    """A point plus the side it is approached from.

    The side matters only when ``x`` equals the discontinuity; it is
    carried along orbits so that landing exactly on ``c`` continues as
    ``c-`` or ``c+``.
    """

    x: Scalar
    side: Optional[Side] = None

    def __str__(self) -> str:
        tag = self.side.value if self.side else ""
        return f"{format_scalar(self.x)}{tag}"


def as_sided(p) -> SidedPoint:
    if isinstance(p, SidedPoint):
        return p
    return SidedPoint(p)


@dataclass(frozen=True)
class BranchFn:
    """One monotone branch assembled from affine pieces.

    ``breakpoints`` are strictly increasing and tile the closed branch
    domain; piece ``i`` is ``x -> slopes[i]*x + intercepts[i]`` on
    ``[breakpoints[i], breakpoints[i+1]]``.  Adjacent pieces agree at the
    shared breakpoint, so evaluation anywhere on the closed domain is
    unambiguous; the value at the domain end adjacent to ``c`` is the
    one-sided limit there.
    """

    breakpoints: tuple
    slopes: tuple
    intercepts: tuple

    def __post_init__(self):
        if len(self.breakpoints) != len(self.slopes) + 1:
            raise ValueError("need one more breakpoint than pieces")
        if len(self.slopes) != len(self.intercepts):
            raise ValueError("slopes and intercepts must pair up")
        if not self.slopes:
            raise ValueError("branch needs at least one piece")

    @classmethod
    def affine(cls, lo: Scalar, hi: Scalar, slope: Scalar, intercept: Scalar):
        return cls((lo, hi), (slope,), (intercept,))

    @property
    def lo(self) -> Scalar:
        return self.breakpoints[0]

    @property
    def hi(self) -> Scalar:
        return self.breakpoints[-1]

    def piece_index(self, x: Scalar, precision_bits: int = DEFAULT_PRECISION_BITS) -> int:
        bps = self.breakpoints
        if cmp_certified(x, bps[0], precision_bits) is Order.LESS:
            raise ValueError(f"{format_scalar(x)} below branch domain")
        for i in range(len(self.slopes)):
            if cmp_certified(x, bps[i + 1], precision_bits) is not Order.GREATER:
                return i
        raise ValueError(f"{format_scalar(x)} above branch domain")

    def value(self, x: Scalar, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
        i = self.piece_index(x, precision_bits)
        return self.slopes[i] * x + self.intercepts[i]

    def solve(self, y: Scalar, precision_bits: int = DEFAULT_PRECISION_BITS) -> Optional[Scalar]:
        """The unique ``x`` in the closed domain with ``value(x) == y``, if any."""
        for i, (s, t) in enumerate(zip(self.slopes, self.intercepts)):
            x = (y - t) / s
            if (
                cmp_certified(x, self.breakpoints[i], precision_bits) is not Order.LESS
                and cmp_certified(x, self.breakpoints[i + 1], precision_bits)
                is not Order.GREATER
            ):
                return x
        return None

    def canonical(self) -> "BranchFn":
        """Merge adjacent pieces that share the same affine map."""
        bps = [self.breakpoints[0]]
        slopes: list = []
        intercepts: list = []
        for i, (s, t) in enumerate(zip(self.slopes, self.intercepts)):
            if slopes and s == slopes[-1] and t == intercepts[-1]:
                bps[-1] = self.breakpoints[i + 1]
                continue
            slopes.append(s)
            intercepts.append(t)
            bps.append(self.breakpoints[i + 1])
        return BranchFn(tuple(bps), tuple(slopes), tuple(intercepts))

    def pieces(self) -> Iterable[tuple]:
        for i, (s, t) in enumerate(zip(self.slopes, self.intercepts)):
            yield self.breakpoints[i], self.breakpoints[i + 1], s, t


@dataclass(frozen=True)
class LorenzMap:
    """Two increasing piecewise-affine branches glued at the discontinuity.

    Immutable after construction; all operations are pure.  Exact
    rational fields drive the full analysis pipeline; certified-real
    fields are supported for evaluation and validation, with ties raising
    :class:`~lorenzmap.numerics.PrecisionExhausted`.
    """

    a: Scalar
    b: Scalar
    c: Scalar
    left: BranchFn
    right: BranchFn
    precision_bits: int = field(default=DEFAULT_PRECISION_BITS, compare=False)

    def cmp(self, x: Scalar, y: Scalar) -> Order:
        return cmp_certified(x, y, self.precision_bits)

    def side_of(self, x: Scalar) -> Order:
        """Position of ``x`` relative to the discontinuity."""
        return self.cmp(x, self.c)

    def is_rational(self) -> bool:
        scalars = [self.a, self.b, self.c]
        for br in (self.left, self.right):
            scalars += list(br.breakpoints) + list(br.slopes) + list(br.intercepts)
        return all(isinstance(s, Fraction) for s in scalars)

    def interior_cuts(self) -> tuple:
        """Breakpoints of the assembled map inside ``(a, b)``, including ``c``."""
        cuts = list(self.left.breakpoints[1:-1]) + [self.c] + list(
            self.right.breakpoints[1:-1]
        )
        return tuple(cuts)

    def canonical(self) -> "LorenzMap":
        return LorenzMap(
            self.a,
            self.b,
            self.c,
            self.left.canonical(),
            self.right.canonical(),
            self.precision_bits,
        )

    def same_map(self, other: "LorenzMap") -> bool:
        """Exact semantic equality (after merging collinear pieces)."""
        s, o = self.canonical(), other.canonical()
        return (
            (s.a, s.b, s.c) == (o.a, o.b, o.c)
            and s.left == o.left
            and s.right == o.right
        )

    def __str__(self) -> str:
        return (
            f"LorenzMap on [{format_scalar(self.a)}, {format_scalar(self.b)}], "
            f"c = {format_scalar(self.c)}"
        )


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_map(m: LorenzMap) -> ValidationReport:
    """Check the Lorenz-map invariants; violations become report entries.

    Expanding is certified via min slope > 1, which is sufficient for
    dense preimages of the discontinuity.
    """
    bad: list[str] = []
    cmp = m.cmp

    if cmp(m.a, m.c) is not Order.LESS or cmp(m.c, m.b) is not Order.LESS:
        bad.append("domain order violated: need a < c < b")
        return ValidationReport(tuple(bad))

    for name, br, lo, hi in (
        ("left", m.left, m.a, m.c),
        ("right", m.right, m.c, m.b),
    ):
        if cmp(br.lo, lo) is not Order.EQUAL or cmp(br.hi, hi) is not Order.EQUAL:
            bad.append(f"{name} branch domain does not tile its side of the domain")
            continue
        bps = br.breakpoints
        monotone_domain = all(
            cmp(bps[i], bps[i + 1]) is Order.LESS for i in range(len(bps) - 1)
        )
        if not monotone_domain:
            bad.append(f"{name} branch breakpoints are not strictly increasing")
            continue
        for i, s in enumerate(br.slopes):
            order = cmp(s, ONE)
            if cmp(s, ZERO) is not Order.GREATER:
                bad.append(f"{name} branch piece {i} is not strictly increasing")
            elif order is not Order.GREATER:
                bad.append(
                    f"expanding violated: {name} branch piece {i} has slope "
                    f"{format_scalar(s)} <= 1"
                )
        for i in range(len(br.slopes) - 1):
            x = bps[i + 1]
            lhs = br.slopes[i] * x + br.intercepts[i]
            rhs = br.slopes[i + 1] * x + br.intercepts[i + 1]
            if cmp(lhs, rhs) is not Order.EQUAL:
                bad.append(f"{name} branch discontinuous at breakpoint {format_scalar(x)}")

    if any("domain" in v or "increasing" in v for v in bad):
        return ValidationReport(tuple(bad))

    left_limit = m.left.value(m.c, m.precision_bits)
    if cmp(left_limit, m.b) is not Order.EQUAL:
        bad.append(
            f"left limit at c is {format_scalar(left_limit)}, expected b = "
            f"{format_scalar(m.b)}"
        )
    right_limit = m.right.value(m.c, m.precision_bits)
    if cmp(right_limit, m.a) is not Order.EQUAL:
        bad.append(
            f"right limit at c is {format_scalar(right_limit)}, expected a = "
            f"{format_scalar(m.a)}"
        )

    fa = m.left.value(m.a, m.precision_bits)
    if cmp(fa, m.a) is Order.LESS or cmp(fa, m.b) is Order.GREATER:
        bad.append(f"f(a) = {format_scalar(fa)} escapes the domain")
    fb = m.right.value(m.b, m.precision_bits)
    if cmp(fb, m.a) is Order.LESS or cmp(fb, m.b) is Order.GREATER:
        bad.append(f"f(b) = {format_scalar(fb)} escapes the domain")

    return ValidationReport(tuple(bad))


def evaluate(m: LorenzMap, p) -> Scalar:
    """Sided evaluation: ``f(c-) = b`` and ``f(c+) = a`` exactly."""
    p = as_sided(p)
    x = p.x
    if m.cmp(x, m.a) is Order.LESS or m.cmp(x, m.b) is Order.GREATER:
        raise ValueError(f"{format_scalar(x)} outside the domain")
    position = m.side_of(x)
    if position is Order.LESS:
        return m.left.value(x, m.precision_bits)
    if position is Order.GREATER:
        return m.right.value(x, m.precision_bits)
    if p.side is Side.MINUS:
        return m.b
    if p.side is Side.PLUS:
        return m.a
    raise SideRequired("evaluation at c needs an explicit side")


def iterate(m: LorenzMap, p, n: int) -> SidedPoint:
    """Apply the map ``n`` times, carrying the side through exact hits of ``c``."""
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    p = as_sided(p)
    x, side = p.x, p.side
    for _ in range(n):
        x = evaluate(m, SidedPoint(x, side))
    return SidedPoint(x, side)


def orbit_values(m: LorenzMap, p, length: int) -> list:
    """Values ``[x, f(x), ..., f^length(x)]`` along a sided orbit."""
    p = as_sided(p)
    x, side = p.x, p.side
    values = [x]
    for _ in range(length):
        x = evaluate(m, SidedPoint(x, side))
        values.append(x)
    return values


def inverse_images(m: LorenzMap, y: Scalar) -> list:
    """All preimages of ``y``: 0, 1, or 2 results, ascending.

    A point has two preimages exactly when it lies in ``[f(a), f(b)]``.
    The boundary values are reached only as one-sided limits, so
    ``y = b`` yields ``c-`` on the left branch and ``y = a`` yields
    ``c+`` on the right branch.
    """
    if m.cmp(y, m.a) is Order.LESS or m.cmp(y, m.b) is Order.GREATER:
        raise ValueError(f"{format_scalar(y)} outside the domain")
    bits = m.precision_bits
    results = []
    x = m.left.solve(y, bits)
    if x is not None:
        if m.cmp(x, m.c) is Order.EQUAL:
            results.append((SidedPoint(m.c, Side.MINUS), BranchLabel.LEFT))
        else:
            results.append((SidedPoint(x), BranchLabel.LEFT))
    x = m.right.solve(y, bits)
    if x is not None:
        if m.cmp(x, m.c) is Order.EQUAL:
            results.append((SidedPoint(m.c, Side.PLUS), BranchLabel.RIGHT))
        else:
            results.append((SidedPoint(x), BranchLabel.RIGHT))
    return results


def _compose_step(m: LorenzMap, pieces: list) -> list:
    """One application of the map to a list of affine pieces.

    Each piece is ``(d0, d1, s, t)``: the composed map so far is
    ``x -> s*x + t`` on ``[d0, d1]``.  The image of every piece must
    avoid the discontinuity in its interior (endpoints may touch it and
    take the one-sided limit); interior crossings mean the caller's
    return-time bookkeeping is wrong.
    """
    cmp = m.cmp
    out = []
    for d0, d1, s, t in pieces:
        y0, y1 = s * d0 + t, s * d1 + t
        if cmp(y1, m.c) is not Order.GREATER:
            branch = m.left
        elif cmp(y0, m.c) is not Order.LESS:
            branch = m.right
        else:
            raise IntervalDoesNotStraddleC(
                "piece image crosses the discontinuity during composition"
            )
        cuts = [
            bp
            for bp in branch.breakpoints[1:-1]
            if cmp(y0, bp) is Order.LESS and cmp(bp, y1) is Order.LESS
        ]
        xs = [d0] + [(ycut - t) / s for ycut in cuts] + [d1]
        for x0, x1 in zip(xs, xs[1:]):
            mid_image_lo = s * x0 + t
            idx = None
            for i in range(len(branch.slopes)):
                if (
                    cmp(mid_image_lo, branch.breakpoints[i]) is not Order.LESS
                    and cmp(s * x1 + t, branch.breakpoints[i + 1]) is not Order.GREATER
                ):
                    idx = i
                    break
            if idx is None:
                raise ValueError("piece image escaped the branch domain")
            bs, bt = branch.slopes[idx], branch.intercepts[idx]
            out.append((x0, x1, bs * s, bs * t + bt))
    return out


def compose_branch(m: LorenzMap, lo: Scalar, hi: Scalar, steps: int) -> list:
    """Piecewise-affine form of ``f^steps`` on ``[lo, hi]``.

    The interval must stay on one side of the discontinuity at every
    intermediate step (one-sided limits at touching endpoints), which is
    exactly the continuity condition a renormalization branch satisfies.
    """
    pieces = [(lo, hi, ONE, ZERO)]
    for _ in range(steps):
        pieces = _compose_step(m, pieces)
    return pieces


def first_return_times(m: LorenzMap, u: Scalar, v: Scalar, cap: int = 10_000):
    """First-return times of ``c-`` and ``c+`` to ``[u, v]``."""
    cmp = m.cmp

    def inside(x) -> bool:
        return cmp(u, x) is not Order.GREATER and cmp(x, v) is not Order.GREATER

    times = []
    for side in (Side.MINUS, Side.PLUS):
        x = m.c
        for n in range(1, cap + 1):
            x = evaluate(m, SidedPoint(x, side))
            if inside(x):
                times.append(n)
                break
        else:
            raise ValueError(f"no return of c{side.value} to [u, v] within {cap} steps")
    ell, r = times
    return ell, r


def rescale_to_unit(m: LorenzMap, J: Interval, return_times=None) -> LorenzMap:
    """First-return map on ``J = [u, v]``, affinely conjugated onto ``[0, 1]``.

    Slopes are preserved by the conjugation, so each rescaled piece slope
    is the product of the composed piece slopes.  ``return_times``
    defaults to the first-return times of ``c-`` / ``c+`` to ``J``.
    """
    u, v = J.lo, J.hi
    cmp = m.cmp
    if cmp(u, m.c) is not Order.LESS or cmp(m.c, v) is not Order.LESS:
        raise IntervalDoesNotStraddleC(f"{J} does not straddle c")
    if cmp(u, m.a) is Order.LESS or cmp(v, m.b) is Order.GREATER:
        raise ValueError(f"{J} is not inside the domain")
    if return_times is None:
        ell, r = first_return_times(m, u, v)
    else:
        ell, r = return_times

    width = v - u

    def conjugate(pieces):
        bps = [(p[0] - u) / width for p in pieces] + [(pieces[-1][1] - u) / width]
        slopes = tuple(p[2] for p in pieces)
        intercepts = tuple((p[2] * u + p[3] - u) / width for p in pieces)
        return BranchFn(tuple(bps), slopes, intercepts).canonical()

    left = conjugate(compose_branch(m, u, m.c, ell))
    right = conjugate(compose_branch(m, m.c, v, r))
    c_new = (m.c - u) / width
    return LorenzMap(ZERO, ONE, c_new, left, right, m.precision_bits)


# --- map families -----------------------------------------------------------


def symmetric_map(a: Scalar, precision_bits: int = DEFAULT_PRECISION_BITS) -> LorenzMap:
    """The symmetric piecewise-linear family on ``[0, 1]`` with slope ``a``.

    Left branch ``a*x + 1 - a/2`` on ``[0, 1/2)``, right branch
    ``a*(x - 1/2)`` on ``(1/2, 1]``; Lorenz for ``1 < a <= 2``.
    """
    left = BranchFn.affine(ZERO, HALF, a, 1 - a / 2)
    right = BranchFn.affine(HALF, ONE, a, -a / 2)
    return LorenzMap(ZERO, ONE, HALF, left, right, precision_bits)


def beta_transformation(
    beta: Scalar, alpha: Scalar, precision_bits: int = DEFAULT_PRECISION_BITS
) -> LorenzMap:
    """``x -> beta*x + alpha mod 1`` as a Lorenz map on ``[0, 1]``.

    The discontinuity is ``c = (1 - alpha)/beta``; the construction
    requires ``0 < c < 1`` (otherwise there is no two-branch form), and
    :func:`validate_map` rejects parameter pairs whose branch images
    escape ``[0, 1]``.
    """
    c = (1 - alpha) / beta
    if (
        cmp_certified(c, ZERO, precision_bits) is not Order.GREATER
        or cmp_certified(c, ONE, precision_bits) is not Order.LESS
    ):
        raise ValueError("beta/alpha give no discontinuity inside (0, 1)")
    left = BranchFn.affine(ZERO, c, beta, alpha)
    right = BranchFn.affine(c, ONE, beta, alpha - 1)
    return LorenzMap(ZERO, ONE, c, left, right, precision_bits)


# --- plain-text map descriptions --------------------------------------------


def parse_map_text(text: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> LorenzMap:
    """Build a map from a key-value description.

    Keys: ``family`` (symmetric | beta | custom); ``a`` for symmetric;
    ``beta``/``alpha`` for beta; for custom: ``domain`` (two endpoints),
    ``c``, and per-branch ``<side>_breakpoints``, ``<side>_slopes``,
    ``<side>_intercepts`` lists.  Scalars are ``p/q`` or decimal strings;
    an optional ``precision = N`` marks decimal parameters as certified
    reals trusted to ``N`` significant digits.
    """
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        entries[key.strip().lower()] = value.strip()

    digits = int(entries["precision"]) if "precision" in entries else None

    def scalar(key: str) -> Scalar:
        raw = entries[key]
        if digits is not None:
            return CertifiedReal.from_decimal(raw, digits)
        return parse_scalar(raw)

    def scalar_list(key: str) -> tuple:
        return tuple(parse_scalar(tok) for tok in entries[key].replace(",", " ").split())

    family = entries.get("family", "").lower()
    if family == "symmetric":
        return symmetric_map(scalar("a"), precision_bits)
    if family == "beta":
        return beta_transformation(scalar("beta"), scalar("alpha"), precision_bits)
    if family == "custom":
        lo, hi = scalar_list("domain")
        c = parse_scalar(entries["c"])
        left = BranchFn(
            scalar_list("left_breakpoints"),
            scalar_list("left_slopes"),
            scalar_list("left_intercepts"),
        )
        right = BranchFn(
            scalar_list("right_breakpoints"),
            scalar_list("right_slopes"),
            scalar_list("right_intercepts"),
        )
        return LorenzMap(lo, hi, c, left, right, precision_bits)
    raise ValueError(f"unknown family {family!r}")


def describe_map(m: LorenzMap) -> dict:
    """JSON-ready echo of the map data (scalars as ``p/q`` strings)."""

    def branch(br: BranchFn) -> dict:
        return {
            "breakpoints": [format_scalar(x) for x in br.breakpoints],
            "slopes": [format_scalar(x) for x in br.slopes],
            "intercepts": [format_scalar(x) for x in br.intercepts],
        }

    return {
        "domain": [format_scalar(m.a), format_scalar(m.b)],
        "c": format_scalar(m.c),
        "left": branch(m.left),
        "right": branch(m.right),
    }
