import random
from fractions import Fraction as F

import pytest

from lorenzmap.numerics import Interval, PrecisionExhausted
from lorenzmap.maps import (
    BranchFn,
    BranchLabel,
    LorenzMap,
    Side,
    SidedPoint,
    SideRequired,
    IntervalDoesNotStraddleC,
    beta_transformation,
    evaluate,
    inverse_images,
    iterate,
    parse_map_text,
    rescale_to_unit,
    symmetric_map,
    validate_map,
)

from conftest import raw_eval, sym_params


def test_validate_symmetric():
    report = validate_map(symmetric_map(F(3, 2)))
    assert report.valid and report.violations == ()


def test_validate_rejects_contracting_piece():
    left = BranchFn.affine(F(0), F(1, 2), F(9, 10), F(11, 20))
    right = BranchFn.affine(F(1, 2), F(1), F(3, 2), F(-3, 4))
    m = LorenzMap(F(0), F(1), F(1, 2), left, right)
    report = validate_map(m)
    assert not report.valid
    assert any("expanding" in v for v in report.violations)


def test_validate_beta_map():
    m = beta_transformation(F(6, 5), F(1, 10))
    assert m.c == F(3, 4)
    assert validate_map(m).valid


def test_validate_reports_broken_boundary():
    # left limit at c is 9/10, not 1
    left = BranchFn.affine(F(0), F(1, 2), F(11, 10), F(7, 20))
    right = BranchFn.affine(F(1, 2), F(1), F(3, 2), F(-3, 4))
    m = LorenzMap(F(0), F(1), F(1, 2), left, right)
    report = validate_map(m)
    assert any("left limit" in v for v in report.violations)


def test_eval_examples():
    m = symmetric_map(F(3, 2))
    assert evaluate(m, F(3, 10)) == F(7, 10)
    assert evaluate(m, SidedPoint(F(1, 2), Side.MINUS)) == F(1)
    assert evaluate(m, SidedPoint(F(1, 2), Side.PLUS)) == F(0)
    with pytest.raises(SideRequired):
        evaluate(m, F(1, 2))
    with pytest.raises(ValueError):
        evaluate(m, F(3, 2))


def test_iterate_examples():
    m = symmetric_map(F(3, 2))
    assert iterate(m, SidedPoint(F(1, 2), Side.PLUS), 2).x == F(1, 4)
    assert iterate(m, F(3, 10), 0).x == F(3, 10)
    t = beta_transformation(F(6, 5), F(1, 10))
    assert iterate(t, SidedPoint(t.c, Side.MINUS), 1).x == F(1)


def test_iterate_carries_side_through_exact_hits():
    # f(1) = c exactly for this beta map, so the minus orbit continues as c-
    m = beta_transformation(F(6, 5), F(19, 55))
    assert evaluate(m, F(1)) == m.c
    p = iterate(m, SidedPoint(m.c, Side.MINUS), 2)
    assert p.x == m.c and p.side is Side.MINUS
    with pytest.raises(SideRequired):
        iterate(m, F(1), 2)  # unsided orbit cannot pass through c


def test_inverse_images_examples():
    m = symmetric_map(F(3, 2))
    hits = inverse_images(m, F(1, 2))
    assert [(p.x, b) for p, b in hits] == [
        (F(1, 6), BranchLabel.LEFT),
        (F(5, 6), BranchLabel.RIGHT),
    ]
    hits = inverse_images(m, F(1, 10))
    assert [(p.x, b) for p, b in hits] == [(F(17, 30), BranchLabel.RIGHT)]
    hits = inverse_images(m, m.b)
    assert len(hits) == 1 and hits[0][0] == SidedPoint(m.c, Side.MINUS)


def test_branch_monotonicity_random():
    rng = random.Random(1)
    m = beta_transformation(F(7, 5), F(1, 7))
    for _ in range(300):
        x = F(rng.randint(0, 10**6), 10**6)
        y = F(rng.randint(0, 10**6), 10**6)
        if x == y or x == m.c or y == m.c:
            continue
        if (x < m.c) != (y < m.c):
            continue
        if x > y:
            x, y = y, x
        assert evaluate(m, x) < evaluate(m, y)


def test_inverse_images_contain_point_random():
    rng = random.Random(2)
    for m in (symmetric_map(F(8, 5)), beta_transformation(F(6, 5), F(1, 10))):
        for _ in range(200):
            x = F(rng.randint(0, 10**6), 10**6)
            if x == m.c:
                continue
            y = evaluate(m, x)
            assert x in [p.x for p, _ in inverse_images(m, y)]


def test_sided_orbit_consistency():
    rng = random.Random(3)
    m = symmetric_map(F(6, 5))
    for _ in range(50):
        x = F(rng.randint(0, 10**4), 10**4)
        j, k = rng.randint(0, 6), rng.randint(0, 6)
        p = SidedPoint(x, Side.MINUS)
        assert iterate(m, p, j + k) == iterate(m, iterate(m, p, j), k)


def test_rescale_first_return_to_unit():
    m = symmetric_map(F(6, 5))
    inner = rescale_to_unit(m, Interval.closed(F(2, 5), F(3, 5)), (2, 2))
    assert inner.same_map(symmetric_map(F(36, 25)))
    # return times are recovered when omitted
    assert rescale_to_unit(m, Interval.closed(F(2, 5), F(3, 5))).same_map(inner)


def test_rescale_whole_domain_is_identity_copy():
    m = symmetric_map(F(3, 2))
    assert rescale_to_unit(m, Interval.closed(F(0), F(1))).same_map(m)


def test_rescale_requires_straddling():
    m = symmetric_map(F(3, 2))
    with pytest.raises(IntervalDoesNotStraddleC):
        rescale_to_unit(m, Interval.closed(F(0), F(2, 5)))


def test_multi_piece_rescale_splits_and_matches_pointwise():
    # the right return window crosses the internal breakpoint at 1/20,
    # so the composed inner branch must split into two affine pieces
    left = BranchFn(
        (F(0), F(1, 20), F(1, 2)), (F(11, 10), F(6, 5)), (F(81, 200), F(2, 5))
    )
    right = BranchFn.affine(F(1, 2), F(1), F(11, 10), F(-11, 20))
    m = LorenzMap(F(0), F(1), F(1, 2), left, right)
    assert validate_map(m).valid
    u, v = F(81, 200), F(11, 20)  # f^2(c+), f^2(c-)
    assert iterate(m, SidedPoint(m.c, Side.PLUS), 2).x == u
    assert iterate(m, SidedPoint(m.c, Side.MINUS), 2).x == v
    inner = rescale_to_unit(m, Interval.closed(u, v), (2, 2))
    assert validate_map(inner).valid
    assert inner.right.slopes == (F(121, 100), F(33, 25))
    rng = random.Random(4)
    width = v - u
    for _ in range(300):
        t = F(rng.randint(0, 10**6), 10**6)
        if t == inner.c:
            continue
        x = u + t * width
        side = Side.MINUS if x < m.c else Side.PLUS
        expect = (iterate(m, SidedPoint(x, side), 2).x - u) / width
        assert evaluate(inner, t) == expect


def test_rescale_level_two_in_base_coordinates():
    # the twice-renormalized interval of the slope-11/10 map, taken in the
    # base coordinates with total return times (4, 4), rescales directly to
    # the symmetric map of slope (11/10)^4
    m = symmetric_map(F(11, 10))
    J = Interval.closed(F(979, 2000), F(1021, 2000))
    inner = rescale_to_unit(m, J, (4, 4))
    assert inner.same_map(symmetric_map(F(11, 10) ** 4))
    assert rescale_to_unit(m, J).same_map(inner)  # auto-detected return times


def test_eval_matches_raw_formula():
    rng = random.Random(5)
    a = F(13, 10)
    m = symmetric_map(a)
    params = sym_params(a)
    for _ in range(200):
        x = F(rng.randint(0, 10**6), 10**6)
        if x == m.c:
            continue
        assert evaluate(m, x) == raw_eval(params, x)


def test_parse_map_text_families(tmp_path):
    m = parse_map_text("family = symmetric\na = 6/5\n")
    assert m.same_map(symmetric_map(F(6, 5)))
    m = parse_map_text("family = beta\nbeta = 6/5\nalpha = 0.1\n")
    assert m.same_map(beta_transformation(F(6, 5), F(1, 10)))
    text = """
    family = custom
    domain = 0 1
    c = 1/2
    left_breakpoints = 0 1/2
    left_slopes = 3/2
    left_intercepts = 1/4
    right_breakpoints = 1/2 1
    right_slopes = 3/2
    right_intercepts = -3/4
    """
    assert parse_map_text(text).same_map(symmetric_map(F(3, 2)))
    with pytest.raises(ValueError):
        parse_map_text("family = nosuch\n")


def test_certified_parameters_cannot_be_validated():
    m = parse_map_text("family = symmetric\na = 1.4142135624\nprecision = 10\n")
    with pytest.raises(PrecisionExhausted):
        validate_map(m)


def test_certified_point_evaluation_on_rational_map():
    # mixed arithmetic: certified point through exact rational branches
    from lorenzmap.numerics import Order, cmp_certified, sqrt_rational

    m = symmetric_map(F(6, 5))
    x = sqrt_rational(2) / 4  # about 0.3536, safely left of c
    y = evaluate(m, x)  # (6/5)x + 2/5, about 0.8243
    assert cmp_certified(y, F(82, 100)) is Order.GREATER
    assert cmp_certified(y, F(83, 100)) is Order.LESS
    p = iterate(m, x, 2)
    assert cmp_certified(p.x, F(0), 256) is Order.GREATER
