"""Renormalization: validity checking, minimal search, towers, trichotomy.

A pair ``(ell, r)`` with both entries > 1 renormalizes the map when the
first-return candidate ``g = (f^ell on [u, c), f^r on (c, v])`` with
``u = f^r(c+)``, ``v = f^ell(c-)`` is itself a Lorenz map on a proper
subinterval ``[u, v]`` around ``c``.  Each renormalization comes with a
repelling set whose gap around ``c`` is bounded by two periodic points
``e- <= u`` and ``e+ >= v`` with ``f^ell(e-) = e-`` and ``f^r(e+) = e+``
exactly; the renormalization is periodic when ``e-`` and ``e+`` lie on
one orbit.

The minimal renormalization is found by a fast path (the minimal-period
orbit flanks the pair of return images of ``c+``/``c-``, giving
``ell = r = kappa``) or, failing
that, by searching pairs in increasing ``ell + r``; the first valid pair
is coordinatewise minimal.  Consecutive minimal renormalizations of the
rescaled inner maps form the tower.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .numerics import Interval, Scalar
from .maps import (
    BranchLabel,
    LorenzMap,
    Side,
    SidedPoint,
    orbit_values,
    rescale_to_unit,
)
from .periods import (
    MinimalPeriodResult,
    PeriodicOrbit,
    minimal_period,
    minimal_periodic_orbit,
)

DEFAULT_PAIR_BOUND = 64
DEFAULT_LEVEL_CAP = 16


@dataclass(frozen=True)
class RenormStep:
    """One renormalization in the coordinates of the map it was cut from."""

    ell: int
    r: int
    u: Scalar
    v: Scalar
    e_minus: Scalar
    e_plus: Scalar
    periodic: bool
    inner_map: LorenzMap
    left_word: tuple  # branch applied at each of the ell left return steps
    right_word: tuple

    def interval(self) -> Interval:
        return Interval.closed(self.u, self.v)


@dataclass(frozen=True)
class RenormCheck:
    step: Optional[RenormStep]
    reason: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.step is not None


def critical_orbit_values(m: LorenzMap, length: int):
    """Values of ``f^i(c-)`` and ``f^i(c+)`` for ``i = 0..length``."""
    minus = orbit_values(m, SidedPoint(m.c, Side.MINUS), length)
    plus = orbit_values(m, SidedPoint(m.c, Side.PLUS), length)
    return minus, plus


def _branch_word(m: LorenzMap, values, steps: int, side: Side) -> tuple:
    """Branch applied at each step by points just inside the limit orbit.

    ``values[i]`` is the one-sided limit of ``f^i`` at the window edge.
    Points approaching a value from below (the ``c-`` window) sit on the
    left branch when the value is at most ``c``; points approaching from
    above (the ``c+`` window) sit on the right branch when the value is
    at least ``c``.
    """
    word = []
    for i in range(steps):
        if side is Side.MINUS:
            left = values[i] <= m.c
        else:
            left = values[i] < m.c
        word.append(BranchLabel.LEFT if left else BranchLabel.RIGHT)
    return tuple(word)


def _word_value(m: LorenzMap, word, x: Scalar) -> Scalar:
    for label in word:
        branch = m.left if label is BranchLabel.LEFT else m.right
        x = branch.value(x, m.precision_bits)
    return x


def _word_orbit(m: LorenzMap, word, x: Scalar) -> list:
    out = [x]
    for label in word[:-1]:
        branch = m.left if label is BranchLabel.LEFT else m.right
        out.append(branch.value(out[-1], m.precision_bits))
    return out


def _word_domain(m: LorenzMap, word):
    """Maximal closed interval on which the branch word can be followed."""
    lo, hi = m.a, m.b
    for label in reversed(word):
        branch = m.left if label is BranchLabel.LEFT else m.right
        range_lo = branch.value(branch.lo, m.precision_bits)
        range_hi = branch.value(branch.hi, m.precision_bits)
        ylo, yhi = max(lo, range_lo), min(hi, range_hi)
        if ylo > yhi:
            raise AssertionError("branch word is not realized by any interval")
        lo = branch.solve(ylo, m.precision_bits)
        hi = branch.solve(yhi, m.precision_bits)
    return lo, hi


def _piece_indices(m: LorenzMap, word, x: Scalar, upper_bias: bool) -> list:
    """Piece index used at every step of the word evaluation of ``x``.

    ``upper_bias`` resolves points sitting exactly on an internal
    breakpoint toward the piece above (used for the lower end of a
    bracket) or below (upper end), so equal index lists certify that the
    whole bracket shares one affine composition.
    """
    indices = []
    for label in word:
        branch = m.left if label is BranchLabel.LEFT else m.right
        bps = branch.breakpoints
        idx = None
        for i in range(len(branch.slopes)):
            if upper_bias:
                if bps[i] <= x and (x < bps[i + 1] or i == len(branch.slopes) - 1):
                    idx = i
                    break
            else:
                if (bps[i] < x or i == 0) and x <= bps[i + 1]:
                    idx = i
                    break
        if idx is None:
            raise AssertionError("point escaped the branch domain during word walk")
        indices.append(idx)
        x = branch.slopes[idx] * x + branch.intercepts[idx]
    return indices


def _fixed_point_along_word(m: LorenzMap, word, lo: Scalar, hi: Scalar) -> Scalar:
    """The unique fixed point of the word composition inside ``[lo, hi]``.

    The composition ``F`` is increasing with slope > 1 on the bracket, so
    ``F - id`` is strictly increasing and crosses zero at most once; the
    bracket must satisfy ``F(lo) <= lo`` and ``F(hi) >= hi``.  The
    affine piece containing the crossing is pinned by splitting the
    bracket at pullbacks of internal breakpoints (exact arithmetic all
    the way), then solved in closed form.
    """
    if _word_value(m, word, lo) > lo:
        raise AssertionError("no repelling fixed point below the return window")
    if _word_value(m, word, hi) < hi:
        raise AssertionError("no repelling fixed point above the return window")
    guard = 0
    while True:
        guard += 1
        if guard > 10_000:
            raise AssertionError("fixed-point bracketing failed to terminate")
        idx_lo = _piece_indices(m, word, lo, upper_bias=True)
        idx_hi = _piece_indices(m, word, hi, upper_bias=False)
        split_at = next(
            (k for k in range(len(word)) if idx_lo[k] != idx_hi[k]), None
        )
        if split_at is None:
            s, t = Fraction(1), Fraction(0)
            x = lo
            for label, i in zip(word, idx_lo):
                branch = m.left if label is BranchLabel.LEFT else m.right
                bs, bt = branch.slopes[i], branch.intercepts[i]
                s, t = bs * s, bs * t + bt
            if s == 1:
                raise AssertionError("word composition is not expanding")
            x = t / (1 - s)
            if not (lo <= x <= hi):
                raise AssertionError("affine fixed point escaped its bracket")
            return x
        # both ends follow the same pieces before the split step, so the
        # partial composition is affine there; pull the breakpoint back
        s, t = Fraction(1), Fraction(0)
        for label, i in zip(word[:split_at], idx_lo[:split_at]):
            branch = m.left if label is BranchLabel.LEFT else m.right
            s, t = branch.slopes[i] * s, branch.slopes[i] * t + branch.intercepts[i]
        branch = (
            m.left if word[split_at] is BranchLabel.LEFT else m.right
        )
        y_split = branch.breakpoints[idx_lo[split_at] + 1]
        x_split = (y_split - t) / s
        if not (lo < x_split < hi):
            raise AssertionError("breakpoint pullback left the bracket")
        if _word_value(m, word, x_split) >= x_split:
            hi = x_split
        else:
            lo = x_split


def _build_step(m: LorenzMap, ell: int, r: int, minus, plus) -> RenormStep:
    u, v = plus[r], minus[ell]
    left_word = _branch_word(m, minus, ell, Side.MINUS)
    right_word = _branch_word(m, plus, r, Side.PLUS)

    dom_lo, dom_hi = _word_domain(m, left_word)
    e_minus = _fixed_point_along_word(m, left_word, dom_lo, min(dom_hi, u))
    dom_lo, dom_hi = _word_domain(m, right_word)
    e_plus = _fixed_point_along_word(m, right_word, max(dom_lo, v), dom_hi)

    if not (e_minus <= u and v <= e_plus):
        raise AssertionError("repelling fixed points do not bound the interval")
    orbit_of_e_minus = _word_orbit(m, left_word, e_minus)
    for value in orbit_of_e_minus:
        if u < value < v:
            raise AssertionError("repelling orbit enters the return window")
    periodic = e_plus in orbit_of_e_minus
    inner = rescale_to_unit(m, Interval.closed(u, v), (ell, r))
    return RenormStep(
        ell, r, u, v, e_minus, e_plus, periodic, inner, left_word, right_word
    )


def _pair_failure(m: LorenzMap, ell: int, r: int, minus, plus) -> Optional[str]:
    """First-return renormalization conditions for ``(ell, r)``; None if all hold.

    Beyond the return images straddling ``c`` on a proper subinterval
    and the return branches mapping back into ``[u, v]``, the two
    windows must stay off the open interval ``(u, v)`` strictly inside
    their return times: a window passing through the interval early
    means ``(f^ell, f^r)`` is not the first return map, and no repelling
    periodic points exist for it.  (Avoiding ``(u, v)`` implies avoiding
    ``c``, so the return branches are continuous.)  Boundary touching is
    allowed; it is the degenerate periodic case.
    """
    c = m.c
    u, v = plus[r], minus[ell]
    if not (u < c < v):
        return "return images of c+ and c- do not straddle c"
    if u == m.a and v == m.b:
        return "return interval is the whole domain"
    for i in range(1, ell):
        if not (minus[i] <= u or plus[r + i] >= v):
            return f"left window meets the return interval after {i} steps"
    for j in range(1, r):
        if not (minus[ell + j] <= u or plus[j] >= v):
            return f"right window meets the return interval after {j} steps"
    if plus[r + ell] < u:
        return "f^ell does not map [u, c) into [u, v]"
    if minus[ell + r] > v:
        return "f^r does not map (c, v] into [u, v]"
    return None


def is_valid_renormalization(m: LorenzMap, ell: int, r: int) -> RenormCheck:
    """Decide whether ``(ell, r)`` renormalizes the map.

    Checks, in order: the return images straddle ``c`` on a proper
    subinterval; the two return windows stay off ``c`` strictly inside
    their first ``ell``/``r`` steps (continuity of the return branches);
    and the return branches map back into ``[u, v]``.  On success the
    repelling fixed points, periodicity flag, and rescaled inner map are
    extracted.
    """
    if ell <= 1 or r <= 1:
        raise ValueError("renormalization needs ell > 1 and r > 1")
    if not m.is_rational():
        raise TypeError("renormalization checking requires an all-rational map")
    minus, plus = critical_orbit_values(m, ell + r)
    reason = _pair_failure(m, ell, r, minus, plus)
    if reason is not None:
        return RenormCheck(None, reason)
    return RenormCheck(_build_step(m, ell, r, minus, plus))


@dataclass(frozen=True)
class PeriodicRenormResult:
    periodic: bool
    step: Optional[RenormStep]
    included: Optional[tuple] = None  # ((u, v), (flank_left, flank_right))


def periodic_renorm_check(
    m: LorenzMap,
    period: Optional[MinimalPeriodResult] = None,
    orbit: Optional[PeriodicOrbit] = None,
) -> PeriodicRenormResult:
    """Fast periodicity test: does the minimal orbit flank the return images?

    With ``kappa`` the minimal period, the minimal renormalization is
    periodic exactly when the return images of ``c+``/``c-`` lie inside the closed
    interval between the orbit points flanking ``c``; boundary touching
    counts (the degenerate case still yields a valid first-return map).
    """
    period = period if period is not None else minimal_period(m)
    if period.kappa is None or period.kappa <= 1:
        raise ValueError("the fast path needs a finite minimal period > 1")
    kappa = period.kappa
    orbit = orbit if orbit is not None else minimal_periodic_orbit(m, kappa)
    minus, plus = critical_orbit_values(m, 2 * kappa)
    u, v = plus[kappa], minus[kappa]
    witness = ((u, v), (orbit.flank_left, orbit.flank_right))
    if not (orbit.flank_left <= u and v <= orbit.flank_right):
        return PeriodicRenormResult(False, None, witness)
    if not (u < m.c < v):
        raise AssertionError("flanked return images do not straddle c")
    left_word = _branch_word(m, minus, kappa, Side.MINUS)
    right_word = _branch_word(m, plus, kappa, Side.PLUS)
    inner = rescale_to_unit(m, Interval.closed(u, v), (kappa, kappa))
    step = RenormStep(
        kappa,
        kappa,
        u,
        v,
        orbit.flank_left,
        orbit.flank_right,
        True,
        inner,
        left_word,
        right_word,
    )
    return PeriodicRenormResult(True, step, witness)


@dataclass(frozen=True)
class MinimalRenormResult:
    """Outcome of the minimal-renormalization decision for one map."""

    step: Optional[RenormStep]
    prime_bound: Optional[int]  # searched exhaustively up to this pair bound
    certainly_prime: bool  # fixed-point maps are prime outright
    fast_path: bool
    period: MinimalPeriodResult
    orbit: Optional[PeriodicOrbit]

    @property
    def found(self) -> bool:
        return self.step is not None


def _search_pairs(m: LorenzMap, bound: int) -> Optional[RenormStep]:
    minus, plus = critical_orbit_values(m, 2 * bound)
    for total in range(4, 2 * bound + 1):
        for ell in range(max(2, total - bound), min(bound, total - 2) + 1):
            r = total - ell
            if _pair_failure(m, ell, r, minus, plus) is None:
                return _build_step(m, ell, r, minus, plus)
    return None


def minimal_renormalization(
    m: LorenzMap,
    bound: int = DEFAULT_PAIR_BOUND,
    period: Optional[MinimalPeriodResult] = None,
    orbit: Optional[PeriodicOrbit] = None,
) -> MinimalRenormResult:
    """The coordinatewise-minimal renormalization, or bounded prime evidence.

    When the periodic fast path succeeds its step is minimal outright.
    Otherwise pairs are searched in increasing ``ell + r`` (ties by
    ``ell``); the minimal renormalization is dominated coordinatewise by
    every other one, so the first valid pair found this way is it.
    """
    period = period if period is not None else minimal_period(m)
    if period.kappa == 1:
        return MinimalRenormResult(None, None, True, False, period, None)
    if period.kappa is not None:
        if orbit is None:
            orbit = minimal_periodic_orbit(m, period.kappa)
        fast = periodic_renorm_check(m, period, orbit)
        if fast.periodic:
            return MinimalRenormResult(fast.step, None, False, True, period, orbit)
    step = _search_pairs(m, bound)
    if step is not None:
        return MinimalRenormResult(step, None, False, False, period, orbit)
    return MinimalRenormResult(None, bound, False, False, period, orbit)


class TowerTerminal(enum.Enum):
    PRIME_UP_TO_BOUND = "prime-up-to-bound"
    PERIOD_CAP_REACHED = "period-cap-reached"
    LEVEL_CAP_REACHED = "level-cap-reached"


@dataclass(frozen=True)
class TowerLevel:
    """A renormalization step with its original-coordinate bookkeeping.

    ``step`` lives in the frame of the map it renormalized;
    ``interval``, ``e_minus`` and ``e_plus`` are mapped back to the base
    map's coordinates; ``return_left``/``return_right`` count base-map
    steps per application of the level's return branches.
    """

    index: int
    step: RenormStep
    interval: tuple
    e_minus: Scalar
    e_plus: Scalar
    return_left: int
    return_right: int


@dataclass(frozen=True)
class Tower:
    levels: tuple
    terminal: TowerTerminal
    bound: int
    level_cap: int

    def __len__(self) -> int:
        return len(self.levels)


def renorm_tower(
    m: LorenzMap,
    level_cap: int = DEFAULT_LEVEL_CAP,
    bound: int = DEFAULT_PAIR_BOUND,
    period: Optional[MinimalPeriodResult] = None,
    orbit: Optional[PeriodicOrbit] = None,
) -> Tower:
    """Consecutive minimal renormalizations of the rescaled inner maps.

    Level intervals are strictly nested around ``c`` in the base map's
    coordinates.  The tower ends when the current inner map shows no
    renormalization up to the pair bound (prime up to bound), when its
    minimal period is undetermined at the cap, or at the level cap.
    """
    levels = []
    g = m
    scale, shift = Fraction(1), Fraction(0)
    cost_left, cost_right = 1, 1
    for index in range(1, level_cap + 1):
        result = minimal_renormalization(g, bound, period, orbit)
        period = orbit = None  # precomputed data applies to the base map only
        if not result.found:
            terminal = (
                TowerTerminal.PERIOD_CAP_REACHED
                if result.period.undetermined
                else TowerTerminal.PRIME_UP_TO_BOUND
            )
            return Tower(tuple(levels), terminal, bound, level_cap)
        step = result.step
        return_left = sum(
            cost_left if lab is BranchLabel.LEFT else cost_right
            for lab in step.left_word
        )
        return_right = sum(
            cost_left if lab is BranchLabel.LEFT else cost_right
            for lab in step.right_word
        )
        levels.append(
            TowerLevel(
                index,
                step,
                (scale * step.u + shift, scale * step.v + shift),
                scale * step.e_minus + shift,
                scale * step.e_plus + shift,
                return_left,
                return_right,
            )
        )
        shift = scale * step.u + shift
        scale = scale * (step.v - step.u)
        cost_left, cost_right = return_left, return_right
        g = step.inner_map
    return Tower(tuple(levels), TowerTerminal.LEVEL_CAP_REACHED, bound, level_cap)


class Trichotomy(enum.Enum):
    PRIME = "prime"
    PERIODIC_MINIMAL_RENORM = "periodic-minimal-renorm"
    CANTOR_MINIMAL_RENORM = "cantor-minimal-renorm"
    UNKNOWN = "prime-up-to-bound"


def classify_trichotomy(
    m: LorenzMap,
    bound: int = DEFAULT_PAIR_BOUND,
    period: Optional[MinimalPeriodResult] = None,
    orbit: Optional[PeriodicOrbit] = None,
) -> tuple:
    """Structure of the minimal completely invariant set.

    Fixed-point maps are prime outright.  A found minimal
    renormalization is classified by its periodicity flag (periodic:
    the set is the minimal orbit; otherwise it is a Cantor set).  With
    nothing found the honest answer is "prime up to the search bound":
    primality has no finite certificate.
    """
    result = minimal_renormalization(m, bound, period, orbit)
    if result.certainly_prime:
        return Trichotomy.PRIME, result
    if result.found:
        if result.step.periodic:
            return Trichotomy.PERIODIC_MINIMAL_RENORM, result
        return Trichotomy.CANTOR_MINIMAL_RENORM, result
    return Trichotomy.UNKNOWN, result
