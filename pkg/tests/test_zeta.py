"""Tests for affine/variety counting, zeta recovery, and Jacobian order."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dworkzeta.errors import (
    InexactDivision,
    NoSolution,
    NotACurveZeta,
    ValidationError,
)
from dworkzeta.ffield import make_field, parse_poly, poly_from_terms
from dworkzeta.oracle import brute_affine, brute_counts
from dworkzeta.zeta import (
    CountSeries,
    ZetaFn,
    affine_count,
    default_bounds,
    expand_series,
    jacobian_detail,
    jacobian_order,
    recover_zeta,
    series_counts,
    variety_count,
    zeta_series,
)

F2 = make_field(2, 1)
F3 = make_field(3, 1)


def P(text, n, spec=F2):
    return parse_poly(text, n, spec)


# -- series ------------------------------------------------------------------------


def test_zeta_series_fixtures():
    assert zeta_series(CountSeries(2, (1, 1, 1))) == [1, 1, 1, 1]
    assert zeta_series(CountSeries(2, (2, 4, 8))) == [1, 2, 4, 8]
    assert zeta_series(CountSeries(2, (0, 2, 0, 2))) == [1, 0, 1, 0, 1]


def test_zeta_series_rejects_nonintegral():
    with pytest.raises(InexactDivision):
        zeta_series(CountSeries(2, (1, 0)))


@settings(max_examples=80)
@given(st.lists(st.integers(-20, 20), min_size=0, max_size=6))
def test_series_counts_inverts_zeta_series(tail):
    z = [1] + tail
    counts = series_counts(z)
    assert zeta_series(CountSeries(2, counts)) == z


def test_expand_series():
    assert expand_series((1,), (1, -2), 3) == [1, 2, 4, 8]
    assert expand_series((1,), (1, 0, -1), 4) == [1, 0, 1, 0, 1]
    with pytest.raises(ValidationError):
        expand_series((1,), (2, 1), 2)


def test_default_bounds():
    assert default_bounds(1, 1) == (256, 256)
    assert default_bounds(2, 1) == (4096, 4096)
    assert default_bounds(1, 2) == (512, 512)
    with pytest.raises(ValidationError):
        default_bounds(0, 1)


# -- recovery ----------------------------------------------------------------------


def test_recover_constant_count():
    zf = recover_zeta(CountSeries(2, (1, 1)), 0, 1)
    assert zf == ZetaFn((1,), (1, -1))


def test_recover_geometric():
    zf = recover_zeta(CountSeries(2, (2, 4)), 1, 1)
    assert zf == ZetaFn((1,), (1, -2))


def test_recover_period_two():
    zf = recover_zeta(CountSeries(2, (0, 2)), 0, 2)
    assert zf == ZetaFn((1,), (1, 0, -1))


def test_recover_inflated_bound_decrements():
    # the 2x2 system for (D1, D2) = (1, 2) on constant counts is singular;
    # the denominator bound shrinks until the system solves
    zf = recover_zeta(CountSeries(2, (1, 1, 1)), 1, 2)
    assert zf == ZetaFn((1,), (1, -1))


def test_recover_no_solution():
    with pytest.raises(NoSolution):
        recover_zeta(CountSeries(2, (1, 3, 1, 3)), 0, 1)


def test_recover_validates_depth():
    with pytest.raises(ValidationError):
        recover_zeta(CountSeries(2, (1,)), 1, 1)
    with pytest.raises(ValidationError):
        recover_zeta(CountSeries(2, (1, 1)), -1, 1)


def test_recover_round_trips_all_counts():
    cases = [
        ((1, 1, 1), (1, 2)),
        ((2, 4, 8), (1, 2)),
        ((0, 2, 0, 2), (2, 2)),
        ((3, 7, 15), (1, 2)),
    ]
    for counts, (D1, D2) in cases:
        cs = CountSeries(2, counts)
        zf = recover_zeta(cs, D1, D2)
        z = expand_series(zf.num, zf.den, cs.depth)
        assert [c.denominator for c in z] == [1] * (cs.depth + 1)
        assert series_counts([int(c) for c in z]) == counts


# -- affine and variety counts -------------------------------------------------------


def test_affine_single_variable_line():
    f = P("x1", 1)
    for k in (1, 2, 3):
        assert affine_count(f, k, F2) == 1


def test_affine_matches_brute():
    cases = [
        (P("x1 + x2 + 1", 2), F2, 1, 2),
        (P("x1^2 + x1 + 1", 1), F2, 1, 0),
        (P("x1^2 + x1 + 1", 1), F2, 2, 2),
        (P("x1^2 + x2", 2, F3), F3, 1, 3),
    ]
    for f, spec, k, frozen in cases:
        got = affine_count(f, k, spec)
        assert got == frozen
        assert got == brute_affine(f, k, spec)


def test_affine_validates_k():
    with pytest.raises(ValidationError):
        affine_count(P("x1", 1), 0, F2)


def test_variety_single_equals_affine():
    f = P("x1 + x2 + 1", 2)
    assert variety_count([f], 1, F2) == affine_count(f, 1, F2)
    assert variety_count([f], 2, F2) == affine_count(f, 2, F2)


def test_variety_crossing_axes():
    fs = [P("x1", 2), P("x2", 2)]
    for k in (1, 2):
        assert variety_count(fs, k, F2) == 1


def test_variety_line_section():
    fs = [P("x1 + x2 + 1", 2), P("x1", 2)]
    assert variety_count(fs, 1, F2) == 1


def test_variety_zero_product_is_whole_space():
    zero = poly_from_terms(2, [], F2)
    assert variety_count([zero], 1, F2) == 4
    assert variety_count([zero], 2, F2) == 16


def test_variety_validates_input():
    with pytest.raises(ValidationError):
        variety_count([], 1, F2)
    with pytest.raises(ValidationError):
        variety_count([P("x1", 1), P("x1", 2)], 1, F2)


# -- Jacobian order -------------------------------------------------------------------


def _curve_zeta(text, depth, D1, D2, spec=F2):
    f = parse_poly(text, 2, spec)
    counts = tuple(brute_affine(f, k, spec) for k in range(1, depth + 1))
    return recover_zeta(CountSeries(spec.q, counts), D1, D2), counts


def test_jacobian_supersingular_curve():
    zv, counts = _curve_zeta("x2^2 + x2 + x1^3", 3, 2, 1)
    assert counts == (2, 8, 8)
    assert zv == ZetaFn((1, 0, 2), (1, -2))
    P_, order = jacobian_detail(zv, 2)
    assert P_ == (1, 0, 2)
    assert order == 3


def test_jacobian_ordinary_curve():
    zv, counts = _curve_zeta("x2^2 + x2 + x1^3 + x1", 3, 2, 1)
    assert counts == (4, 4, 4)
    assert zv == ZetaFn((1, 2, 2), (1, -2))
    assert jacobian_order(zv, 2) == 5


def test_jacobian_genus_zero():
    zv, _ = _curve_zeta("x1^2 + x2", 2, 0, 1)
    assert zv == ZetaFn((1,), (1, -2))
    P_, order = jacobian_detail(zv, 2)
    assert P_ == (1,)
    assert order == 1


def test_jacobian_strips_cyclotomic_content():
    # rational hyperbola: N_k = 2^k - 1 gives zeta (1-T)/(1-2T); the 1-T is
    # cyclotomic content and the residual P is trivial
    zv, counts = _curve_zeta("x1 + x2 + x1*x2", 2, 1, 1)
    assert counts == (1, 3)
    assert zv == ZetaFn((1, -1), (1, -2))
    P_, order = jacobian_detail(zv, 2)
    assert P_ == (1,)
    assert order == 1


def test_jacobian_rejects_non_curve_zeta():
    with pytest.raises(NotACurveZeta):
        jacobian_order(ZetaFn((1,), (1, 0, -2)), 2)


def test_jacobian_rejects_reducible_curve():
    # two crossing lines: residual denominator survives and is flagged
    f = P("x1*x2", 2)
    counts = tuple(brute_affine(f, k, F2) for k in range(1, 4))
    assert counts == (3, 7, 15)
    zv = recover_zeta(CountSeries(2, counts), 1, 2)
    with pytest.raises(NotACurveZeta):
        jacobian_order(zv, 2)


def test_weil_shape_on_curve_fixtures():
    for text, bounds in (("x2^2 + x2 + x1^3", (2, 1)), ("x2^2 + x2 + x1^3 + x1", (2, 1))):
        zv, _ = _curve_zeta(text, 3, *bounds)
        P_, _ = jacobian_detail(zv, 2)
        deg = len(P_) - 1
        assert deg % 2 == 0
        assert P_[-1] == 2 ** (deg // 2)


def test_counts_from_oracle_series():
    f = P("x1 + x2 + 1", 2)
    cs = brute_counts(f, 2, F2)
    assert isinstance(cs, CountSeries)
    zf = recover_zeta(cs, 1, 1)
    assert zf == ZetaFn((1,), (1, -2))
