"""Trace-formula core: the series F, the matrix A_N, twisted powers, counts.

The count of torus zeros comes out of one congruence: with A_N the matrix of
tau^(a-1)-twisted F-coefficients on cone points of weight <= t,

    (q^k - 1)^(n+1) Tr((A tau^{-1}(A) ... tau^{-(a-1)}(A))^k)
        = q^k N_k - (q^k - 1)^n   (mod p^N),

and N = (n+1)ak pins the count exactly.  Everything here serves that line.

Matrices are stored as b = (p-1)a packed integer planes of shape (W, W), one
per ring basis element pi^j mu^i, because the hot loop is plain modular
matrix multiplication: each plane product runs as an exact tiled float64
BLAS multiply (dot products are kept below 2^53), and ring structure enters
only through the b x b x b structure-constant fold.  Quadratic rings (b = 2)
use a 3-multiply Karatsuba split.  For moduli too large for exact float64
the planes fall back to object dtype and arbitrary-precision dot products.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cone import ConeCtx, MonomialIndex, count_points, enumerate_points
from .errors import (
    InexactDivision,
    NonIntegerTrace,
    SizeCapExceeded,
    ValidationError,
)
from .ffield import FieldSpec, Poly
from .padic import PadicCtx, RElem, build_ctx, r_add, r_mul, tau_pow, teichmuller
from .splitting import ThetaTable, compute_theta, truncation_degree

# tiled-BLAS geometry: float64 panels of roughly tile x W entries
_TILE = 1024
# row chunks for coefficient gathers and elementwise traces
_CHUNK = 256


def matrix_weight_bound(p: int, N: int) -> int:
    """Weight cutoff t for the matrix index: ceil(p^2 N/(p-1)^2) - 1."""
    return -(-(p * p * N) // ((p - 1) * (p - 1))) - 1


@dataclass(frozen=True)
class FSeries:
    """Truncated coefficients of F = prod theta(a_j X^j), weight <= t_tilde."""

    ctx: PadicCtx
    cc: ConeCtx
    t_tilde: int
    coeffs: dict  # exponent tuple -> RElem


class SemiMatrix:
    """W x W matrix over R/(p^N), stored as b packed residue planes."""

    __slots__ = ("index", "ctx", "planes")

    def __init__(self, index: MonomialIndex, ctx: PadicCtx, planes: np.ndarray):
        self.index = index
        self.ctx = ctx
        self.planes = planes

    @property
    def W(self) -> int:
        return len(self.index)

    def entry(self, u: int, v: int) -> RElem:
        a = self.ctx.a
        flat = [int(self.planes[e, u, v]) for e in range(self.planes.shape[0])]
        rows = tuple(tuple(flat[j * a + i] for i in range(a)) for j in range(self.ctx.pi_rows))
        return RElem(self.ctx, rows)

    def trace(self) -> RElem:
        ctx = self.ctx
        comps = [int(np.trace(self.planes[e], dtype=object) if self.planes.dtype == object
                     else np.trace(self.planes[e].astype(np.int64))) % ctx.mod
                 for e in range(self.planes.shape[0])]
        return _relem_from_components(comps, ctx)


def _relem_from_components(comps, ctx: PadicCtx) -> RElem:
    a = ctx.a
    rows = tuple(
        tuple(comps[j * a + i] % ctx.mod for i in range(a)) for j in range(ctx.pi_rows)
    )
    return RElem(ctx, rows)


def _plane_dtype(mod: int):
    if mod <= 2 ** 15:
        return np.int16
    if mod <= 2 ** 25:  # keeps (mod-1)^2 within exact float64 dot products
        return np.int32
    return object


@lru_cache(maxsize=None)
def _ring_data(ctx: PadicCtx):
    """Structure constants sc[e1,e2,e] and tau mixing matrices over the basis
    pi^j mu^i, flat index e = j*a + i."""
    a, b = ctx.a, ctx.pi_rows * ctx.a
    basis = []
    for e in range(b):
        rows = [[0] * a for _ in range(ctx.pi_rows)]
        rows[e // a][e % a] = 1
        basis.append(ctx.elem(rows))
    sc = np.zeros((b, b, b), dtype=np.int64)
    for e1 in range(b):
        for e2 in range(b):
            prod = r_mul(basis[e1], basis[e2], ctx)
            for j in range(ctx.pi_rows):
                for i in range(a):
                    sc[e1, e2, j * a + i] = prod.c[j][i]
    mix = np.zeros((a, b, b), dtype=np.int64)
    for s in range(a):
        for e in range(b):
            img = tau_pow(s, basis[e], ctx)
            for j in range(ctx.pi_rows):
                for i in range(a):
                    mix[s, e, j * a + i] = img.c[j][i]
    return sc, mix


# -- the series F ---------------------------------------------------------------


def compute_F(f: Poly, theta: ThetaTable, ctx: PadicCtx, cc: ConeCtx, t_tilde: int) -> FSeries:
    """prod over the support of X_0 f of theta(a_j X^j), weights <= t_tilde.

    Each factor is supported on multiples of its exponent j (which has
    weight 1), so the truncated product stays inside the cone and is cut
    back to weight <= t_tilde after every factor.
    """
    if f.is_zero:
        raise ValidationError("F is only defined for nonzero f")
    if t_tilde > theta.t_tilde:
        raise ValueError("theta table too short for requested truncation")
    n = f.n
    zero_exp = (0,) * (n + 1)
    series = {zero_exp: ctx.one()}
    for exps, coeff in sorted(f.terms.items()):
        j = (1,) + exps
        om = teichmuller(coeff, ctx)
        # factor coefficients lambda_r * om^r at exponent r*j, weight r
        fac = []
        om_pow = ctx.one()
        for r in range(t_tilde + 1):
            fac.append(r_mul(theta.lambdas[r], om_pow, ctx))
            om_pow = r_mul(om_pow, om, ctx)
        new = {}
        for rvec, cf in series.items():
            room = t_tilde - rvec[0]
            for r in range(room + 1):
                term = fac[r] if r else None
                val = r_mul(cf, term, ctx) if r else cf
                if val.is_zero:
                    continue
                key = tuple(x + r * y for x, y in zip(rvec, j))
                cur = new.get(key)
                new[key] = val if cur is None else r_add(cur, val, ctx)
        series = {k: v for k, v in new.items() if not v.is_zero}
    return FSeries(ctx, cc, t_tilde, series)


# -- the matrix A_N ---------------------------------------------------------------


def build_A(F: FSeries, t: int, ctx: PadicCtx, size_cap: int | None = None) -> SemiMatrix:
    """Matrix on cone points of weight <= t: entry (u,v) = tau^(a-1)(F_{pu-v}).

    Exponents pu-v with a negative coordinate, outside the cone, or of
    weight > t_tilde give zero entries (the last because such coefficients
    vanish mod p^N by the decay bound).  Values are gathered through a dense
    lookup table over the bounded coordinate box, one plane per ring
    component, with the tau twist applied to the table once up front.
    """
    cc, tt = F.cc, F.t_tilde
    idx = enumerate_points(t, cc, size_cap)
    W = len(idx)
    p, a, mod = ctx.p, ctx.a, ctx.mod
    b = ctx.pi_rows * a
    dtype = _plane_dtype(mod)

    # dense per-component tables over the box [0,tt] x [0, d*tt]^n
    dims = (tt + 1,) + (cc.d * tt + 1,) * cc.n
    strides = np.ones(cc.n + 1, dtype=np.int64)
    for i in range(cc.n - 1, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    flat_size = int(strides[0] * dims[0])
    tables = np.zeros((b, flat_size), dtype=np.int64 if dtype is not object else object)
    for rvec, val in F.coeffs.items():
        tw = tau_pow(a - 1, val, ctx)
        code = int(np.dot(np.array(rvec, dtype=np.int64), strides))
        for jrow in range(ctx.pi_rows):
            for i in range(a):
                tables[jrow * a + i, code] = tw.c[jrow][i]

    U = idx.coords()
    planes = np.zeros((b, W, W), dtype=dtype)
    d = cc.d
    VT = U.T.copy()  # (n+1, W)
    for lo in range(0, W, _CHUNK):
        hi = min(lo + _CHUNK, W)
        diff = p * U[lo:hi, :, None] - VT[None, :, :]  # (chunk, n+1, W)
        r0 = diff[:, 0, :]
        tail = diff[:, 1:, :]
        ok = (diff >= 0).all(axis=1) & (r0 <= tt) & (tail.sum(axis=1) <= d * r0)
        ok &= (tail <= d * tt).all(axis=1)
        code = np.einsum("cvw,v->cw", np.clip(diff, 0, None), strides)
        np.clip(code, 0, flat_size - 1, out=code)
        for e in range(b):
            vals = tables[e][code]
            if dtype is object:
                planes[e, lo:hi, :] = np.where(ok, vals, 0)
            else:
                planes[e, lo:hi, :] = np.where(ok, vals, 0).astype(dtype)
    return SemiMatrix(idx, ctx, planes)


# -- exact modular plane multiplication ----------------------------------------------


def _twisted(planes: np.ndarray, mix_s: np.ndarray, mod: int, rows=None, cols=None):
    """Component mix of a (sub)block: out[e'] = sum_e mix_s[e,e'] planes[e]."""
    sub = planes[:, rows if rows is not None else slice(None), :]
    if cols is not None:
        sub = sub[:, :, cols]
    if planes.dtype == object:
        return np.tensordot(mix_s.astype(object), sub, axes=([0], [0])) % mod
    out = np.tensordot(mix_s, sub.astype(np.int64), axes=([0], [0]))
    out %= mod
    return out


def _matmul_planes(pa: np.ndarray, pb: np.ndarray, ctx: PadicCtx, twist: int = 0) -> np.ndarray:
    """C = pa . tau^{twist}(pb) as packed planes, exact mod p^N."""
    sc, mix = _ring_data(ctx)
    mod = ctx.mod
    b, W, _ = pa.shape
    if pa.dtype == object:
        pb_t = _twisted(pb, mix[twist], mod) if twist else pb
        out = np.zeros((b, W, W), dtype=object)
        for e1 in range(b):
            for e2 in range(b):
                g = np.dot(pa[e1], pb_t[e2]) % mod
                for e in range(b):
                    c = int(sc[e1, e2, e])
                    if c:
                        out[e] = (out[e] + c * g) % mod
        return out

    kmax = (2 ** 53 - 1) // ((mod - 1) ** 2)
    assert kmax >= 1
    out = np.zeros((b, W, W), dtype=pa.dtype)
    quad = b == 2
    if quad:
        beta, alpha = int(sc[1, 1, 0]), int(sc[1, 1, 1])
    for i0 in range(0, W, _TILE):
        i1 = min(i0 + _TILE, W)
        rows = slice(i0, i1)
        for j0 in range(0, W, _TILE):
            j1 = min(j0 + _TILE, W)
            cols = slice(j0, j1)
            acc = np.zeros((b, i1 - i0, j1 - j0), dtype=np.int64)
            for k0 in range(0, W, kmax):
                k1 = min(k0 + kmax, W)
                asub = pa[:, rows, k0:k1].astype(np.float64)
                if twist:
                    bsub = _twisted(pb, mix[twist], mod, slice(k0, k1), cols).astype(np.float64)
                else:
                    bsub = pb[:, k0:k1, cols].astype(np.float64)
                if b == 1:
                    acc[0] += np.fmod(asub[0] @ bsub[0], mod).astype(np.int64)
                elif quad:
                    m1 = np.fmod(asub[0] @ bsub[0], mod).astype(np.int64)
                    m2 = np.fmod(asub[1] @ bsub[1], mod).astype(np.int64)
                    m3 = np.fmod(
                        np.fmod(asub[0] + asub[1], mod) @ np.fmod(bsub[0] + bsub[1], mod),
                        mod,
                    ).astype(np.int64)
                    acc[0] += m1 + beta * m2
                    acc[1] += m3 - m1 - m2 + alpha * m2
                else:
                    for e1 in range(b):
                        for e2 in range(b):
                            g = np.fmod(asub[e1] @ bsub[e2], mod).astype(np.int64)
                            for e in range(b):
                                c = int(sc[e1, e2, e])
                                if c:
                                    acc[e] += c * g
                acc %= mod
            out[:, rows, cols] = acc.astype(pa.dtype)
    return out


def _trace_product(pa: np.ndarray, pb: np.ndarray, ctx: PadicCtx, twist: int = 0) -> RElem:
    """Tr(pa . tau^{twist}(pb)) without forming the product matrix."""
    sc, mix = _ring_data(ctx)
    mod = ctx.mod
    b, W, _ = pa.shape
    inner = np.zeros((b, b), dtype=object)
    if pa.dtype == object:
        pb_t = _twisted(pb, mix[twist], mod) if twist else pb
        for e1 in range(b):
            for e2 in range(b):
                inner[e1, e2] = int(np.sum(pa[e1] * pb_t[e2].T)) % mod
    else:
        step = max(1, min(_CHUNK, (2 ** 62) // (mod * mod * W) or 1))
        for lo in range(0, W, step):
            hi = min(lo + step, W)
            rows = slice(lo, hi)
            a_chunk = pa[:, rows, :].astype(np.int64)
            # columns lo:hi of tau(pb), transposed to align with the row chunk
            if twist:
                bt = _twisted(pb, mix[twist], mod, None, slice(lo, hi))
            else:
                bt = pb[:, :, rows].astype(np.int64)
            for e1 in range(b):
                for e2 in range(b):
                    prod = a_chunk[e1] * bt[e2].T
                    prod %= mod
                    inner[e1, e2] += int(prod.sum())
    comps = [0] * b
    for e1 in range(b):
        for e2 in range(b):
            s = int(inner[e1, e2]) % mod
            if s:
                for e in range(b):
                    c = int(sc[e1, e2, e])
                    if c:
                        comps[e] = (comps[e] + c * s) % mod
    return _relem_from_components(comps, ctx)


# -- semilinear powers ------------------------------------------------------------


def _pair_mul(r, Mr, s, Ms, ctx: PadicCtx):
    """(r, Mr) . (s, Ms) = (r+s mod a, Mr . tau^{-r}(Ms))."""
    a = ctx.a
    twist = (-r) % a
    return (r + s) % a, _matmul_planes(Mr, Ms, ctx, twist=twist)


def _semilinear_base(A: SemiMatrix, upto: int) -> np.ndarray:
    """prod_{i=0}^{upto-1} tau^{-i}(A) as planes, square-and-multiply on pairs."""
    ctx = A.ctx
    if upto == 1:
        return A.planes
    result = None  # pair (r, M)
    base = (1, A.planes)
    e = upto
    while e:
        if e & 1:
            result = base if result is None else _pair_mul(*result, *base, ctx)
        e >>= 1
        if e:
            base = _pair_mul(*base, *base, ctx)
    return result[1]


def _plain_power(planes: np.ndarray, k: int, ctx: PadicCtx) -> np.ndarray:
    result = None
    base = planes
    e = k
    while e:
        if e & 1:
            result = base if result is None else _matmul_planes(result, base, ctx)
        e >>= 1
        if e:
            base = _matmul_planes(base, base, ctx)
    return result


def semilinear_power(A: SemiMatrix, a: int, k: int, ctx: PadicCtx) -> SemiMatrix:
    """B = (A tau^{-1}(A) ... tau^{-(a-1)}(A))^k.

    Pairs (exponent mod a, matrix) are combined square-and-multiply style up
    to exponent a; past that the product is tau-linear and ordinary matrix
    powering finishes the job.
    """
    if a != ctx.a:
        raise ValidationError("a must match the ring context")
    if a < 1 or k < 1:
        raise ValidationError("need a >= 1 and k >= 1")
    base = _semilinear_base(A, a)
    return SemiMatrix(A.index, ctx, _plain_power(base, k, ctx))


def _trace_of_semilinear_power(A: SemiMatrix, a: int, k: int) -> RElem:
    """Tr(semilinear_power(A, a, k)) with the final multiply done as a trace."""
    ctx = A.ctx
    if k == 1:
        if a == 1:
            return A.trace()
        left = _semilinear_base(A, a - 1)
        # remaining factor tau^{-(a-1)}(A); tau^{-(a-1)} = tau^{(1-a) mod a}
        return _trace_product(left, A.planes, ctx, twist=(1 - a) % a)
    base = _semilinear_base(A, a)
    left = _plain_power(base, k - 1, ctx)
    return _trace_product(left, base, ctx)


# -- the counting algorithm ----------------------------------------------------------


@dataclass(frozen=True)
class ToricRun:
    """One trace-formula run and everything worth reporting about it."""

    count: int | None  # exact count, or None when N was overridden below default
    bracket: int  # ((q^k-1)^{n+1} T + (q^k-1)^n) mod p^N
    exact: bool
    N: int
    t: int
    t_tilde: int
    W: int
    W_tilde: int
    timings: dict


def toric_run(
    f: Poly,
    k: int,
    spec: FieldSpec,
    N_opt: int | None = None,
    size_cap: int | None = None,
    t_opt: int | None = None,
) -> ToricRun:
    """Count zeros of f on the n-torus over F_{q^k} via the trace formula.

    N defaults to (n+1)ak, which makes q^k N_k + (q^k-1)^n (mod p^N) recover
    the count exactly; a smaller override still yields the congruence bracket
    but no count.
    """
    if f.is_zero or f.d < 1:
        raise ValidationError("toric counting needs a nonconstant polynomial")
    if k < 1:
        raise ValidationError("extension degree k must be >= 1")
    n, a, p, q = f.n, spec.a, spec.p, spec.q
    N_default = (n + 1) * a * k
    N = N_default if N_opt is None else N_opt
    if N < 1:
        raise ValidationError("precision must be >= 1")
    exact = N >= N_default
    timings = {}

    start = time.perf_counter()
    ctx = build_ctx(spec, N)
    theta = compute_theta(ctx)
    timings["theta"] = time.perf_counter() - start

    cc = ConeCtx(n, f.d)
    tt = truncation_degree(p, N)
    t = matrix_weight_bound(p, N) if t_opt is None else t_opt
    if size_cap is not None:
        implied = count_points(t, cc)
        if implied > size_cap:
            raise SizeCapExceeded(implied, size_cap)

    start = time.perf_counter()
    F = compute_F(f, theta, ctx, cc, tt)
    timings["f_series"] = time.perf_counter() - start

    start = time.perf_counter()
    A = build_A(F, t, ctx, size_cap)
    timings["build_a"] = time.perf_counter() - start

    start = time.perf_counter()
    T = _trace_of_semilinear_power(A, a, k)
    timings["power"] = time.perf_counter() - start

    start = time.perf_counter()
    bad_mu = any(v != 0 for row in T.c for v in row[1:])
    bad_pi = any(v != 0 for row in T.c[1:] for v in row[:1])
    if bad_mu or bad_pi:
        raise NonIntegerTrace(f"trace has nonvanishing pi/mu components: {T.c}")
    t_int = T.c[0][0]
    qk = q ** k
    bracket = ((qk - 1) ** (n + 1) * t_int + (qk - 1) ** n) % ctx.mod
    count = None
    if exact:
        if bracket % qk:
            raise InexactDivision(f"bracket {bracket} not divisible by q^k = {qk}")
        count = bracket // qk
    timings["count"] = time.perf_counter() - start

    return ToricRun(
        count=count,
        bracket=bracket,
        exact=exact,
        N=N,
        t=t,
        t_tilde=tt,
        W=len(A.index),
        W_tilde=count_points(tt, cc),
        timings=timings,
    )


def toric_count(f: Poly, k: int, spec: FieldSpec, N_opt: int | None = None):
    """Exact toric zero count; with N_opt below (n+1)ak, (bracket, False)."""
    run = toric_run(f, k, spec, N_opt=N_opt)
    if run.exact:
        return run.count
    return run.bracket, False
