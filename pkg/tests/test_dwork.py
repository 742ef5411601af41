"""Tests for the trace-formula core: F series, matrix assembly, twisted powers,
and toric counts checked against the brute-force oracle."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dworkzeta.cone import ConeCtx, enumerate_points, weight
from dworkzeta.dwork import (
    FSeries,
    SemiMatrix,
    ToricRun,
    _matmul_planes,
    _plane_dtype,
    _trace_of_semilinear_power,
    build_A,
    compute_F,
    matrix_weight_bound,
    semilinear_power,
    toric_count,
    toric_run,
)
from dworkzeta.errors import SizeCapExceeded, ValidationError
from dworkzeta.ffield import make_field, parse_poly
from dworkzeta.oracle import brute_toric
from dworkzeta.padic import build_ctx, pi_valuation, r_add, r_mul, tau_pow, teichmuller
from dworkzeta.splitting import compute_theta, truncation_degree

F2 = make_field(2, 1)
F3 = make_field(3, 1)
F4 = make_field(2, 2)
F9 = make_field(3, 2)


def P(text, n, spec):
    return parse_poly(text, n, spec)


def same(x, y):
    return x.c == y.c


# -- weight cutoff ---------------------------------------------------------------


def test_matrix_weight_bound_values():
    assert matrix_weight_bound(2, 3) == 11
    assert matrix_weight_bound(2, 6) == 23
    assert matrix_weight_bound(3, 2) == 4
    assert matrix_weight_bound(3, 6) == 13
    assert matrix_weight_bound(5, 3) == 4


def test_matrix_cutoff_never_exceeds_series_cutoff():
    for p in (2, 3, 5, 7):
        for N in range(1, 13):
            assert matrix_weight_bound(p, N) <= truncation_degree(p, N)
    # equal for p = 2 since (p-1)^2 = p-1
    assert matrix_weight_bound(2, 5) == truncation_degree(2, 5)


# -- the series F ----------------------------------------------------------------


def _f_series(f, spec, N):
    ctx = build_ctx(spec, N)
    theta = compute_theta(ctx)
    tt = truncation_degree(spec.p, N)
    cc = ConeCtx(f.n, f.d)
    return compute_F(f, theta, ctx, cc, tt), theta, ctx


def test_f_constant_term_is_one():
    for spec in (F2, F3):
        F, _, ctx = _f_series(P("x1 + x2 + 1", 2, spec), spec, 3)
        assert same(F.coeffs[(0, 0, 0)], ctx.one())


def test_f_single_term_reproduces_splitting_coefficients():
    # f = x1: one factor theta(X0 x1), coefficient at r*(1,1) is lambda_r
    F, theta, ctx = _f_series(P("x1", 1, F3), F3, 2)
    for key in F.coeffs:
        assert key[0] == key[1]
    for r in range(F.t_tilde + 1):
        got = F.coeffs.get((r, r), ctx.zero())
        assert same(got, theta.lambdas[r])


def test_f_scales_by_teichmuller_of_coefficient():
    # f = g*x1 over F_4 with g a generator: coefficient at r*(1,1) is
    # lambda_r * omega^r with omega the multiplicative lift of g
    g = (0, 1)
    f = parse_poly("{0,1}*x1", 1, F4)
    F, theta, ctx = _f_series(f, F4, 2)
    om = teichmuller(g, ctx)
    om_pow = ctx.one()
    for r in range(F.t_tilde + 1):
        got = F.coeffs.get((r, r), ctx.zero())
        assert same(got, r_mul(theta.lambdas[r], om_pow, ctx))
        om_pow = r_mul(om_pow, om, ctx)


def test_f_coefficient_decay():
    # min(val, N) >= min(w(r)(p-1)/p^2, N) for every retained coefficient
    for spec, N in ((F2, 3), (F3, 2)):
        f = P("x1 + x2 + 1", 2, spec)
        F, _, ctx = _f_series(f, spec, N)
        cc = ConeCtx(2, 1)
        p = spec.p
        for rvec, val in F.coeffs.items():
            w = weight(rvec, cc)
            assert w <= F.t_tilde
            v = pi_valuation(val, ctx)
            bound = min(Fraction(w * (p - 1), p * p), Fraction(N))
            assert min(v, Fraction(N)) >= bound or v == math.inf


# -- matrix assembly ---------------------------------------------------------------


def _expected_entry(F, idx, u, v, ctx):
    key = tuple(ctx.p * x - y for x, y in zip(idx[u], idx[v]))
    if any(c < 0 for c in key):
        return ctx.zero()
    val = F.coeffs.get(key)
    if val is None:
        return ctx.zero()
    return tau_pow(ctx.a - 1, val, ctx)


def test_build_a_entries_exhaustive_base_field():
    f = P("x1 + x2 + 1", 2, F2)
    F, _, ctx = _f_series(f, F2, 2)
    A = build_A(F, 2, ctx)
    idx = A.index
    assert len(idx) == 10
    for u in range(10):
        for v in range(10):
            assert same(A.entry(u, v), _expected_entry(F, idx, u, v, ctx))


def test_build_a_entries_exhaustive_extension_field():
    # a = 2: entries carry a tau twist
    f = parse_poly("x1 + x2 + {0,1}", 2, F4)
    F, _, ctx = _f_series(f, F4, 2)
    A = build_A(F, 3, ctx)
    idx = A.index
    for u in range(len(idx)):
        for v in range(len(idx)):
            assert same(A.entry(u, v), _expected_entry(F, idx, u, v, ctx))


def test_build_a_size_cap():
    f = P("x1 + x2 + 1", 2, F2)
    F, _, ctx = _f_series(f, F2, 2)
    with pytest.raises(SizeCapExceeded):
        build_A(F, 7, ctx, size_cap=10)


def test_trace_is_sum_of_diagonal():
    f = P("x1 + x2 + 1", 2, F2)
    F, _, ctx = _f_series(f, F2, 2)
    A = build_A(F, 3, ctx)
    acc = ctx.zero()
    for u in range(A.W):
        acc = r_add(acc, A.entry(u, u), ctx)
    assert same(A.trace(), acc)


# -- semilinear powers vs a naive ring-level oracle ---------------------------------


def _grid(A):
    return [[A.entry(u, v) for v in range(A.W)] for u in range(A.W)]


def _gtau(g, s, ctx):
    return [[tau_pow(s, x, ctx) for x in row] for row in g]


def _gmul(ga, gb, ctx):
    W = len(ga)
    out = []
    for u in range(W):
        row = []
        for v in range(W):
            acc = ctx.zero()
            for w in range(W):
                acc = r_add(acc, r_mul(ga[u][w], gb[w][v], ctx), ctx)
            row.append(acc)
        out.append(row)
    return out


def _naive_semilinear_power(A, a, k, ctx):
    g = _grid(A)
    prod = g
    for i in range(1, a):
        prod = _gmul(prod, _gtau(g, (a - i) % a, ctx), ctx)
    out = prod
    for _ in range(k - 1):
        out = _gmul(out, prod, ctx)
    return out


# (n, d, t) triples whose cone index has exactly W points
_INDEX_SHAPES = {3: (1, 1, 1), 4: (1, 2, 1), 6: (1, 1, 2), 9: (1, 2, 2)}


def _random_matrix(ctx, W, rng):
    n, d, t = _INDEX_SHAPES[W]
    idx = enumerate_points(t, ConeCtx(n, d))
    assert len(idx) == W
    b = ctx.pi_rows * ctx.a
    planes = rng.integers(0, ctx.mod, size=(b, W, W)).astype(_plane_dtype(ctx.mod))
    return SemiMatrix(idx, ctx, planes)


CTXS = [
    build_ctx(F2, 3),  # b = 1
    build_ctx(F3, 2),  # b = 2
    build_ctx(F4, 3),  # b = 2, a = 2
    build_ctx(F9, 2),  # b = 4, a = 2
]


def test_semilinear_power_matches_naive():
    rng = np.random.default_rng(7)
    for ctx in CTXS:
        for k in (1, 2, 3):
            A = _random_matrix(ctx, 3, rng)
            got = semilinear_power(A, ctx.a, k, ctx)
            want = _naive_semilinear_power(A, ctx.a, k, ctx)
            for u in range(A.W):
                for v in range(A.W):
                    assert same(got.entry(u, v), want[u][v])


def test_trace_path_matches_materialized_power():
    rng = np.random.default_rng(11)
    for ctx in CTXS:
        for k in (1, 2, 3):
            A = _random_matrix(ctx, 4, rng)
            lhs = _trace_of_semilinear_power(A, ctx.a, k)
            rhs = semilinear_power(A, ctx.a, k, ctx).trace()
            assert same(lhs, rhs)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 3))
def test_trace_path_matches_naive_random(seed, k):
    ctx = CTXS[2]
    rng = np.random.default_rng(seed)
    A = _random_matrix(ctx, 3, rng)
    want = _naive_semilinear_power(A, ctx.a, k, ctx)
    tr = ctx.zero()
    for u in range(A.W):
        tr = r_add(tr, want[u][u], ctx)
    assert same(_trace_of_semilinear_power(A, ctx.a, k), tr)


def test_semilinear_power_validates_arguments():
    rng = np.random.default_rng(3)
    A = _random_matrix(CTXS[0], 3, rng)
    with pytest.raises(ValidationError):
        semilinear_power(A, 2, 1, CTXS[0])
    with pytest.raises(ValidationError):
        semilinear_power(A, 1, 0, CTXS[0])


# -- exactness of the packed integer kernel ----------------------------------------


def _as_object(planes):
    out = np.empty(planes.shape, dtype=object)
    out[...] = planes
    return out


def test_matmul_int_kernel_matches_object_kernel():
    rng = np.random.default_rng(19)
    for ctx in CTXS:
        b = ctx.pi_rows * ctx.a
        pa = rng.integers(0, ctx.mod, size=(b, 9, 9)).astype(_plane_dtype(ctx.mod))
        pb = rng.integers(0, ctx.mod, size=(b, 9, 9)).astype(_plane_dtype(ctx.mod))
        for twist in range(ctx.a):
            fast = _matmul_planes(pa, pb, ctx, twist=twist)
            slow = _matmul_planes(_as_object(pa), _as_object(pb), ctx, twist=twist)
            assert fast.dtype != object
            assert np.array_equal(fast.astype(np.int64), slow.astype(np.int64))


def test_matmul_handles_inner_dimension_splitting():
    # mod = 2^25 forces int32 planes and kmax = 8 < W, so the k loop splits
    ctx = build_ctx(F2, 25)
    assert _plane_dtype(ctx.mod) == np.int32
    rng = np.random.default_rng(23)
    pa = rng.integers(0, ctx.mod, size=(1, 15, 15)).astype(np.int32)
    pb = rng.integers(0, ctx.mod, size=(1, 15, 15)).astype(np.int32)
    fast = _matmul_planes(pa, pb, ctx)
    slow = _matmul_planes(_as_object(pa), _as_object(pb), ctx)
    want = (pa[0].astype(object) @ pb[0].astype(object)) % ctx.mod
    assert np.array_equal(fast[0].astype(object), want)
    assert np.array_equal(slow[0], want)


# -- toric counts ------------------------------------------------------------------


def test_toric_count_line_over_f2():
    f = P("x1 + x2 + 1", 2, F2)
    assert toric_count(f, 1, F2) == 0
    assert toric_count(f, 2, F2) == 2
    assert brute_toric(f, 2, F2) == 2


def test_toric_count_parabola_over_f3():
    f = P("x1^2 + x2", 2, F3)
    assert toric_count(f, 1, F3) == 2
    assert toric_count(f, 1, F3) == brute_toric(f, 1, F3)
    assert toric_count(f, 2, F3) == brute_toric(f, 2, F3)


def test_toric_count_cubic_over_f3():
    f = P("x1^3 + x2^2 + x2", 2, F3)
    assert toric_count(f, 1, F3) == brute_toric(f, 1, F3)


def test_toric_count_extension_fields():
    f4 = parse_poly("x1 + x2 + {0,1}", 2, F4)
    assert toric_count(f4, 1, F4) == brute_toric(f4, 1, F4)
    f9 = P("x1 + x2 + 1", 2, F9)
    assert toric_count(f9, 1, F9) == brute_toric(f9, 1, F9)


def test_congruence_holds_at_every_intermediate_precision():
    f = P("x1^2 + x2", 2, F3)
    star = brute_toric(f, 1, F3)
    for N in range(1, 4):
        run = toric_run(f, 1, F3, N_opt=N)
        assert run.bracket == (3 * star) % 3 ** N
        assert run.exact == (N >= 3)
        assert (run.count is None) == (N < 3)


def test_precision_override_flags():
    f = P("x1 + x2 + 1", 2, F2)
    out = toric_count(f, 1, F2, N_opt=1)
    assert out == (toric_run(f, 1, F2, N_opt=1).bracket, False)
    assert toric_count(f, 1, F2, N_opt=3) == 0
    # raising N past the default keeps the count exact
    assert toric_run(f, 1, F2, N_opt=4).count == 0


def test_matrix_cutoff_is_saturated():
    # growing t beyond the default cannot change the count
    f = P("x1 + x2 + 1", 2, F2)
    base = toric_run(f, 1, F2)
    for extra in (1, 2):
        run = toric_run(f, 1, F2, t_opt=base.t + extra)
        assert run.count == base.count
        assert run.W > base.W


def test_run_report_fields():
    f = P("x1 + x2 + 1", 2, F2)
    run = toric_run(f, 1, F2)
    assert isinstance(run, ToricRun)
    assert run.N == 3 and run.t == 11 and run.t_tilde == 11
    assert run.W == run.W_tilde == 364  # sum of C(r0+2,2) for r0 <= 11
    assert set(run.timings) == {"theta", "f_series", "build_a", "power", "count"}
    assert all(v >= 0 for v in run.timings.values())


def test_toric_run_is_deterministic():
    f = parse_poly("x1 + x2 + {0,1}", 2, F4)
    r1 = toric_run(f, 1, F4)
    r2 = toric_run(f, 1, F4)
    assert r1.count == r2.count
    assert r1.bracket == r2.bracket
    F, _, ctx = _f_series(f, F4, 2)
    a1 = build_A(F, 3, ctx)
    a2 = build_A(F, 3, ctx)
    assert a1.planes.tobytes() == a2.planes.tobytes()


def test_toric_run_validation():
    zero = P("0", 2, F2)
    const = P("1", 2, F2)
    f = P("x1 + x2 + 1", 2, F2)
    with pytest.raises(ValidationError):
        toric_run(zero, 1, F2)
    with pytest.raises(ValidationError):
        toric_run(const, 1, F2)
    with pytest.raises(ValidationError):
        toric_run(f, 0, F2)
    with pytest.raises(ValidationError):
        toric_run(f, 1, F2, N_opt=0)
    with pytest.raises(SizeCapExceeded):
        toric_run(f, 1, F2, size_cap=100)
