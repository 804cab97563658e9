"""Shared test fixtures and straight-line oracles.

The oracles here deliberately avoid the library's branch/piece
machinery: maps are evaluated from explicit affine formulas, periodic
points are found by composing itinerary words, and interval images are
iterated endpoint by endpoint.  Expected values frozen in the tests
were computed with these.
"""

from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest

# params = (c, slope_left, intercept_left, slope_right, intercept_right) on [0, 1]


def sym_params(a: F):
    return (F(1, 2), a, 1 - a / 2, a, -a / 2)


def beta_params(beta: F, alpha: F):
    c = (1 - alpha) / beta
    return (c, beta, alpha, beta, alpha - 1)


def raw_eval(params, x, side=None):
    c, sL, tL, sR, tR = params
    if x < c:
        return sL * x + tL
    if x > c:
        return sR * x + tR
    if side == "-":
        return sL * c + tL
    if side == "+":
        return sR * c + tR
    raise ValueError("side needed at the discontinuity")


def raw_orbit(params, x, n, side=None):
    values = [x]
    for _ in range(n):
        values.append(raw_eval(params, values[-1], side))
    return values


def word_periodic_points(params, n):
    """All fixed points of the n-th iterate, via itinerary-word solves.

    Returns {point: least_period}.  Orbits passing exactly through the
    discontinuity are not representable by a two-letter word and are
    not reported; callers assert none occur in their samples.
    """
    c, sL, tL, sR, tR = params
    out = {}
    for word in itertools.product("LR", repeat=n):
        s, t = F(1), F(0)
        for w in word:
            bs, bt = (sL, tL) if w == "L" else (sR, tR)
            s, t = bs * s, bs * t + bt
        if s == 1:
            continue
        x0 = t / (1 - s)
        x, ok = x0, True
        for w in word:
            if w == "L" and not F(0) <= x < c:
                ok = False
                break
            if w == "R" and not c < x <= F(1):
                ok = False
                break
            x = raw_eval(params, x)
        if not ok or x != x0 or x0 in out:
            continue
        y, least = raw_eval(params, x0), 1
        while y != x0:
            y = raw_eval(params, y)
            least += 1
        out[x0] = least
    return out


def raw_closed_image(params, lo, hi):
    """Doubled-point image of a closed interval, split at c."""
    c = params[0]
    top = raw_eval(params, c, "-")
    bottom = raw_eval(params, c, "+")
    if lo < c < hi:
        return [(raw_eval(params, lo), top), (bottom, raw_eval(params, hi))]
    if hi <= c:
        return [(raw_eval(params, lo), top if hi == c else raw_eval(params, hi))]
    return [(bottom if lo == c else raw_eval(params, lo), raw_eval(params, hi))]


def normalize_pairs(pairs):
    pairs = sorted(pairs)
    out = [list(pairs[0])]
    for lo, hi in pairs[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(p) for p in out]


def raw_cover_steps(params, lo, hi, cap):
    """Least n whose cumulative closed images tile [0, 1]; None if > cap."""
    frontier = normalize_pairs([(lo, hi)])
    total = frontier
    if total == [(F(0), F(1))]:
        return 0
    for n in range(1, cap + 1):
        nxt = []
        for p, q in frontier:
            nxt += raw_closed_image(params, p, q)
        frontier = normalize_pairs(nxt)
        total = normalize_pairs(total + frontier)
        if total == [(F(0), F(1))]:
            return n
    return None


@pytest.fixture(scope="session")
def sample_maps():
    """Seeded rational parameter samples for both families, no fixed points.

    Symmetric slopes lie in (1, 2); beta pairs satisfy 0 < alpha < 2 - beta
    so the two-branch form is a valid expanding Lorenz map without fixed
    points.  Minimal periods are kept small enough for cylinder
    enumeration to stay cheap.
    """
    import random

    import lorenzmap as lz

    rng = random.Random(20260810)
    maps = []
    while len(maps) < 25:
        a = F(rng.randint(101, 199), 100)
        maps.append(("symmetric", a, None, lz.symmetric_map(a)))
    while len(maps) < 50:
        beta = F(rng.randint(105, 195), 100)
        hi = 2 - beta
        alpha = hi * F(rng.randint(1, 99), 100)
        if alpha <= 0 or alpha >= hi:
            continue
        m = lz.beta_transformation(beta, alpha)
        if not lz.validate_map(m).valid:
            continue
        per = lz.minimal_period(m, 500)
        if per.kappa is None or per.kappa > 12:
            continue
        maps.append(("beta", beta, alpha, m))
    return maps
