"""Truncated p-adic arithmetic in R/(p^N) = (Z/p^N)[mu, pi].

The ring relations are pi^(p-1) = -p and hhat(mu) = 0, where hhat is a
monic integer lift of the defining polynomial of F_q = F_p[y]/(h).  An
element is stored as a (p-1) x a array of residues mod p^N, coefficient
c[j][i] sitting on pi^j mu^i.  Reducing mod pi recovers F_q, which is how
units are detected; reducing mod p recovers F_q[pi]/(pi^(p-1)).

For p = 2 the pi-dimension collapses: pi^1 = -2, so R has a single pi-row
and pi is just the residue -2.  Everything below handles that uniformly.

All Newton loops (inversion, Teichmueller lift, Frobenius lift) run for
exactly ceil(log2((p-1)*N)) steps at the full modulus p^N; quadratic
convergence from a seed correct mod pi makes that count sufficient.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import CtxMismatch, IndexOutOfRange, NotAUnit
from .ffield import FieldSpec, FqElem


def _newton_steps(p: int, N: int) -> int:
    # exact ceil(log2((p-1) N)) without float error
    return ((p - 1) * N - 1).bit_length()


def _balanced_lift(c: int, p: int) -> int:
    # representative of c mod p in the interval (-p/2, (p+1)/2)
    return c - p if c > p // 2 else c


class PadicCtx:
    """Precomputed data for one ring R/(p^N): lifted modulus, Frobenius tables."""

    __slots__ = ("spec", "N", "mod", "h_lift", "tau_tables")

    def __init__(self, spec: FieldSpec, N: int, h_lift: tuple, tau_tables: tuple):
        self.spec = spec
        self.N = N
        self.mod = spec.p ** N
        self.h_lift = h_lift
        self.tau_tables = tau_tables  # tau_tables[i-1] acts as tau^i, 1 <= i < a

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def a(self) -> int:
        return self.spec.a

    @property
    def pi_rows(self) -> int:
        return self.p - 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PadicCtx)
            and self.spec == other.spec
            and self.N == other.N
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.N))

    def __repr__(self) -> str:
        return f"PadicCtx(p={self.p}, a={self.a}, N={self.N})"

    # -- element constructors ------------------------------------------------

    def elem(self, rows) -> "RElem":
        c = tuple(tuple(v % self.mod for v in row) for row in rows)
        if len(c) != self.pi_rows or any(len(row) != self.a for row in c):
            raise ValueError("element array must be (p-1) x a")
        return RElem(self, c)

    def zero(self) -> "RElem":
        return RElem(self, tuple((0,) * self.a for _ in range(self.pi_rows)))

    def from_int(self, k: int) -> "RElem":
        row0 = (k % self.mod,) + (0,) * (self.a - 1)
        rest = tuple((0,) * self.a for _ in range(self.pi_rows - 1))
        return RElem(self, (row0,) + rest)

    def one(self) -> "RElem":
        return self.from_int(1)

    def pi(self) -> "RElem":
        if self.p == 2:
            return self.from_int(-2)
        rows = [[0] * self.a for _ in range(self.pi_rows)]
        rows[1][0] = 1
        return self.elem(rows)

    def mu(self) -> "RElem":
        if self.a == 1:
            raise ValueError("mu is only a generator when a > 1")
        rows = [[0] * self.a for _ in range(self.pi_rows)]
        rows[0][1] = 1
        return self.elem(rows)

    def from_mu_vec(self, vec) -> "RElem":
        """Element of the unramified part R0 from mu-basis coordinates."""
        row0 = tuple(v % self.mod for v in vec)
        rest = tuple((0,) * self.a for _ in range(self.pi_rows - 1))
        return RElem(self, (row0,) + rest)


class RElem:
    """One ring element: immutable (p-1) x a residue array tied to its ctx."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: PadicCtx, c: tuple):
        self.ctx = ctx
        self.c = c

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for row in self.c for v in row)

    def residue(self) -> FqElem:
        """Image in F_q under reduction mod pi."""
        return tuple(v % self.ctx.p for v in self.c[0])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RElem) and self.ctx == other.ctx and self.c == other.c
        )

    def __hash__(self) -> int:
        return hash(self.c)

    def __add__(self, other):
        return r_add(self, other, self.ctx)

    def __sub__(self, other):
        return r_sub(self, other, self.ctx)

    def __mul__(self, other):
        return r_mul(self, other, self.ctx)

    def __neg__(self):
        zero = self.ctx.zero()
        return r_sub(zero, self, self.ctx)

    def __pow__(self, e: int):
        if e < 0:
            return r_inv(self, self.ctx) ** (-e)
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __repr__(self) -> str:
        return f"RElem({self.ctx!r}, {self.c})"


# -- mu-polynomial helpers (vectors over Z/p^N, reduced by h_lift) -----------


def _mupoly_reduce(w: list, ctx: PadicCtx) -> list:
    a, mod, h = ctx.a, ctx.mod, ctx.h_lift
    for k in range(len(w) - 1, a - 1, -1):
        c = w[k] % mod
        if c:
            # subtract c * h_lift * mu^(k-a); h_lift is monic so this clears w[k]
            for i in range(a):
                w[k - a + i] = (w[k - a + i] - c * h[i]) % mod
        w[k] = 0
    return [v % mod for v in w[:a]]


def _mupoly_mul(u, v, ctx: PadicCtx) -> list:
    a, mod = ctx.a, ctx.mod
    if a == 1:
        return [u[0] * v[0] % mod]
    w = [0] * (2 * a - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                w[i + j] += ui * vj
    return _mupoly_reduce(w, ctx)


def _mupoly_pow(u, e: int, ctx: PadicCtx) -> list:
    result = [1] + [0] * (ctx.a - 1)
    base = list(u)
    while e:
        if e & 1:
            result = _mupoly_mul(result, base, ctx)
        base = _mupoly_mul(base, base, ctx)
        e >>= 1
    return result


def _mupoly_eval(coeffs, g, ctx: PadicCtx) -> list:
    """Evaluate an integer-coefficient polynomial at the mu-poly g (Horner)."""
    a, mod = ctx.a, ctx.mod
    res = [coeffs[-1] % mod] + [0] * (a - 1)
    for c in reversed(coeffs[:-1]):
        res = _mupoly_mul(res, g, ctx)
        res[0] = (res[0] + c) % mod
    return res


# -- construction -------------------------------------------------------------


def build_ctx(spec: FieldSpec, N: int) -> PadicCtx:
    """Build R/(p^N): lift h with balanced coefficients, Newton-lift tau.

    tau is the unique ring automorphism with tau(mu) = (root of hhat
    congruent to mu^p mod p); its matrix on the mu-power basis is computed
    once, higher powers by matrix multiplication.
    """
    if N < 1:
        raise ValueError("precision N must be >= 1")
    p, a = spec.p, spec.a
    h_lift = tuple(_balanced_lift(c, p) for c in spec.h)
    ctx = PadicCtx(spec, N, h_lift, ())
    if a == 1:
        return ctx

    # seed: g0 = mu^p reduced mod (hhat, p^N); seed inverse of hhat'(g0) in F_q
    g = _mupoly_reduce([0] * p + [1], ctx)
    h_deriv = tuple(i * h_lift[i] for i in range(1, a + 1))
    mu_p_fq = spec.frobenius(spec.elem([0, 1] + [0] * (a - 2)))
    hd_fq = _fq_eval(tuple(c % p for c in h_deriv), mu_p_fq, spec)
    s = [v % ctx.mod for v in spec.inv(hd_fq)]

    for _ in range(_newton_steps(p, N)):
        hg = _mupoly_eval(h_lift, g, ctx)
        g = [(gi - sum_mul) % ctx.mod for gi, sum_mul in zip(g, _mupoly_mul(hg, s, ctx))]
        hdg = _mupoly_eval(h_deriv, g, ctx)
        corr = _mupoly_mul(hdg, _mupoly_mul(s, s, ctx), ctx)
        s = [(2 * si - ci) % ctx.mod for si, ci in zip(s, corr)]

    if any(v % ctx.mod for v in _mupoly_eval(h_lift, g, ctx)):
        raise ArithmeticError("Frobenius lift failed to converge")

    # table rows: coordinates of tau(mu^i) = g^i
    tbl = []
    row = [1] + [0] * (a - 1)
    for _ in range(a):
        tbl.append(tuple(row))
        row = _mupoly_mul(row, g, ctx)
    tables = [tuple(tbl)]
    for _ in range(a - 2):
        prev = tables[-1]
        nxt = tuple(
            tuple(_matvec(prev_row, tbl, ctx)) for prev_row in prev
        )
        tables.append(nxt)
    return PadicCtx(spec, N, h_lift, tuple(tables))


def _matvec(vec, tbl, ctx: PadicCtx) -> list:
    # coordinates of tau(sum vec[i] mu^i) given tbl[i] = coords of tau(mu^i)
    a, mod = ctx.a, ctx.mod
    out = [0] * a
    for vi, row in zip(vec, tbl):
        if vi:
            for k in range(a):
                out[k] = (out[k] + vi * row[k]) % mod
    return out


def _fq_eval(coeffs, x: FqElem, spec: FieldSpec) -> FqElem:
    res = spec.from_int(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        res = spec.add(spec.mul(res, x), spec.from_int(c))
    return res


# -- ring operations -----------------------------------------------------------


def _check(x: RElem, ctx: PadicCtx):
    if x.ctx != ctx:
        raise CtxMismatch("operand built under a different ring context")


def r_add(x: RElem, y: RElem, ctx: PadicCtx) -> RElem:
    _check(x, ctx)
    _check(y, ctx)
    mod = ctx.mod
    return RElem(
        ctx,
        tuple(
            tuple((u + v) % mod for u, v in zip(rx, ry)) for rx, ry in zip(x.c, y.c)
        ),
    )


def r_sub(x: RElem, y: RElem, ctx: PadicCtx) -> RElem:
    _check(x, ctx)
    _check(y, ctx)
    mod = ctx.mod
    return RElem(
        ctx,
        tuple(
            tuple((u - v) % mod for u, v in zip(rx, ry)) for rx, ry in zip(x.c, y.c)
        ),
    )


def r_mul(x: RElem, y: RElem, ctx: PadicCtx) -> RElem:
    _check(x, ctx)
    _check(y, ctx)
    p, a, mod = ctx.p, ctx.a, ctx.mod
    rows = ctx.pi_rows
    acc = [[0] * a for _ in range(rows)]
    for j1, row1 in enumerate(x.c):
        if not any(row1):
            continue
        for j2, row2 in enumerate(y.c):
            if not any(row2):
                continue
            prod = _mupoly_mul(row1, row2, ctx)
            j = j1 + j2
            if j >= rows:
                j -= rows  # pi^(p-1) = -p
                prod = [-p * v for v in prod]
            dst = acc[j]
            for i in range(a):
                dst[i] = (dst[i] + prod[i]) % mod
    return RElem(ctx, tuple(tuple(row) for row in acc))


def r_inv(x: RElem, ctx: PadicCtx) -> RElem:
    """Inverse of a unit: invert the residue in F_q, then Newton-refine."""
    _check(x, ctx)
    res = x.residue()
    if all(v == 0 for v in res):
        raise NotAUnit("reduction mod pi vanishes")
    s = ctx.from_mu_vec(ctx.spec.inv(res))
    two = ctx.from_int(2)
    for _ in range(_newton_steps(ctx.p, ctx.N)):
        s = r_mul(s, r_sub(two, r_mul(x, s, ctx), ctx), ctx)
    return s


def teichmuller(x: FqElem, ctx: PadicCtx) -> RElem:
    """The root of unity in R0 congruent to x mod p; teichmuller(0) = 0.

    Newton-lifts a root of Y^(q-1) - 1 from the integer lift of x.
    """
    p, a, q, mod = ctx.p, ctx.a, ctx.spec.q, ctx.mod
    if all(v == 0 for v in x):
        return ctx.zero()
    g = [v % mod for v in x] + [0] * (a - len(x))
    # seed inverse of phi'(g) = (q-1) g^(q-2): in F_q this is -x^(-1), so -x inverts it
    s = [(-v) % mod for v in g]
    for _ in range(_newton_steps(p, ctx.N)):
        gq2 = _mupoly_pow(g, q - 2, ctx)
        phi = _mupoly_mul(gq2, g, ctx)
        phi[0] = (phi[0] - 1) % mod
        step = _mupoly_mul(phi, s, ctx)
        g = [(gi - st) % mod for gi, st in zip(g, step)]
        dphi = [((q - 1) * v) % mod for v in _mupoly_pow(g, q - 2, ctx)]
        corr = _mupoly_mul(dphi, _mupoly_mul(s, s, ctx), ctx)
        s = [(2 * si - ci) % mod for si, ci in zip(s, corr)]
    return ctx.from_mu_vec(g)


def tau_pow(i: int, x: RElem, ctx: PadicCtx) -> RElem:
    """Apply tau^i; tau fixes pi and permutes the mu-coordinates by table."""
    _check(x, ctx)
    if not 0 <= i < ctx.a:
        raise IndexOutOfRange(f"tau power {i} outside 0..{ctx.a - 1}")
    if i == 0:
        return x
    tbl = ctx.tau_tables[i - 1]
    return RElem(ctx, tuple(tuple(_matvec(row, tbl, ctx)) for row in x.c))


def pi_valuation(x: RElem, ctx: PadicCtx):
    """min over nonzero entries of v_p(entry) + j/(p-1); +inf if all vanish.

    Values >= N are indistinguishable from 0 at this precision and come back
    as +inf, so bounds on valuations must be phrased truncated at N.
    """
    _check(x, ctx)
    p = ctx.p
    best = None
    for j, row in enumerate(x.c):
        for v in row:
            if v == 0:
                continue
            vp = 0
            while v % p == 0:
                v //= p
                vp += 1
            val = Fraction(vp * (p - 1) + j, p - 1)
            if best is None or val < best:
                best = val
    return math.inf if best is None else best
