"""Brute-force ground truth: explicit F_{q^k} towers and exhaustive counting.

Everything here stays deliberately naive -- evaluate the polynomial at every
point and count zeros -- so the fast trace-formula path has an independent
check.  The extension F_{q^k} is built directly over F_q as F_q[z]/(g) with
a deterministic search for g, avoiding any embedding bookkeeping: all
coefficients we ever evaluate already live in F_q.

Internally F_q elements are coded as integers 0..q-1 (base-p digits of the
coordinate vector) with q x q lookup tables, and F_{q^k} elements are
length-k tuples of codes.  That keeps the inner evaluation loop to table
lookups and small-tuple convolutions.
"""

from __future__ import annotations

import itertools

from .errors import CapExceeded, NoIrreducibleFound
from .ffield import FieldSpec, FqElem, Poly, is_irreducible
from .zeta import CountSeries

DEFAULT_CAP = 10 ** 8

# element lists and power tables are only materialized for fields this small
_TABLE_LIMIT = 2 ** 21


def _fq_code(x: FqElem, p: int) -> int:
    code = 0
    for c in reversed(x):
        code = code * p + c
    return code


class ExtField:
    """F_{q^k} = F_q[z]/(g), elements as length-k tuples of F_q codes."""

    __slots__ = (
        "spec", "k", "q", "size", "g", "zero", "one",
        "_fq", "_add", "_mul", "_neg",
    )

    def __init__(self, spec: FieldSpec, k: int, g=None):
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.spec = spec
        self.k = k
        q = spec.q
        self.q = q
        self.size = q ** k
        self._fq = list(spec.elements())  # index == code
        self._add = [
            [_fq_code(spec.add(x, y), spec.p) for y in self._fq] for x in self._fq
        ]
        self._mul = [
            [_fq_code(spec.mul(x, y), spec.p) for y in self._fq] for x in self._fq
        ]
        self._neg = [_fq_code(spec.neg(x), spec.p) for x in self._fq]
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)
        self.g = tuple(g) if g is not None else self._find_modulus()

    def _find_modulus(self) -> tuple:
        """First monic irreducible degree-k polynomial in code order."""
        spec, k, q = self.spec, self.k, self.q
        for m in range(self.size):
            codes = []
            v = m
            for _ in range(k):
                codes.append(v % q)
                v //= q
            cand = [self._fq[c] for c in codes] + [spec.one]
            if is_irreducible(cand, spec):
                return tuple(codes) + (1,)
        raise NoIrreducibleFound(f"no irreducible of degree {k} over F_{q}")

    # -- element plumbing ------------------------------------------------------

    def element_at(self, i: int) -> tuple:
        digits = []
        for _ in range(self.k):
            digits.append(i % self.q)
            i //= self.q
        return tuple(digits)

    def elements(self):
        for i in range(self.size):
            yield self.element_at(i)

    def embed(self, c: FqElem) -> tuple:
        return (_fq_code(c, self.spec.p),) + (0,) * (self.k - 1)

    # -- arithmetic -------------------------------------------------------------

    def add(self, x: tuple, y: tuple) -> tuple:
        add = self._add
        return tuple(add[u][v] for u, v in zip(x, y))

    def neg(self, x: tuple) -> tuple:
        neg = self._neg
        return tuple(neg[u] for u in x)

    def sub(self, x: tuple, y: tuple) -> tuple:
        return self.add(x, self.neg(y))

    def mul(self, x: tuple, y: tuple) -> tuple:
        k, add, mul = self.k, self._add, self._mul
        if k == 1:
            return (mul[x[0]][y[0]],)
        w = [0] * (2 * k - 1)
        for i, u in enumerate(x):
            if u:
                row = mul[u]
                for j, v in enumerate(y):
                    if v:
                        w[i + j] = add[w[i + j]][row[v]]
        # reduce by monic g
        g, neg = self.g, self._neg
        for m in range(2 * k - 2, k - 1, -1):
            c = w[m]
            if c:
                row = mul[c]
                for i in range(k):
                    gi = g[i]
                    if gi:
                        w[m - k + i] = add[w[m - k + i]][neg[row[gi]]]
            w[m] = 0
        return tuple(w[:k])

    def pow(self, x: tuple, e: int) -> tuple:
        result = self.one
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, x: tuple) -> tuple:
        if x == self.zero:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(x, self.size - 2)

    def frobenius_q(self, x: tuple) -> tuple:
        return self.pow(x, self.q)

    def trace(self, x: tuple) -> tuple:
        acc, y = self.zero, x
        for _ in range(self.k):
            acc = self.add(acc, y)
            y = self.frobenius_q(y)
        return acc

    def norm(self, x: tuple) -> tuple:
        acc, y = self.one, x
        for _ in range(self.k):
            acc = self.mul(acc, y)
            y = self.frobenius_q(y)
        return acc

    def in_base_field(self, x: tuple) -> bool:
        return all(c == 0 for c in x[1:])


def _count_zeros(f: Poly, ext: ExtField, include_zero: bool) -> int:
    n = f.n
    terms = [
        (ext.embed(c), tuple((j, e) for j, e in enumerate(exps) if e))
        for exps, c in sorted(f.terms.items())
    ]
    zero = ext.zero
    lo = 0 if include_zero else 1
    if ext.size <= _TABLE_LIMIT:
        elems = [ext.element_at(i) for i in range(ext.size)]
        powtab = {}
        for _, nz in terms:
            for j, e in nz:
                if (j, e) not in powtab:
                    powtab[(j, e)] = [ext.pow(x, e) for x in elems]
        count = 0
        for pt in itertools.product(range(lo, ext.size), repeat=n):
            tot = zero
            for cst, nz in terms:
                v = cst
                for j, e in nz:
                    v = ext.mul(v, powtab[(j, e)][pt[j]])
                tot = ext.add(tot, v)
            if tot == zero:
                count += 1
        return count
    # table-free path for huge fields: same loop, powers computed in place
    count = 0
    for pt in itertools.product(range(lo, ext.size), repeat=n):
        xs = [ext.element_at(i) for i in pt]
        tot = zero
        for cst, nz in terms:
            v = cst
            for j, e in nz:
                v = ext.mul(v, ext.pow(xs[j], e))
            tot = ext.add(tot, v)
        if tot == zero:
            count += 1
    return count


def _check_cap(spec: FieldSpec, k: int, n: int, cap: int) -> None:
    points = spec.q ** (k * n)
    if points > cap:
        raise CapExceeded(points, cap)


def brute_toric(f: Poly, k: int, spec: FieldSpec, cap: int = DEFAULT_CAP) -> int:
    """Zeros of f with all coordinates nonzero in F_{q^k}, by enumeration."""
    _check_cap(spec, k, f.n, cap)
    if f.is_zero:
        return (spec.q ** k - 1) ** f.n
    return _count_zeros(f, ExtField(spec, k), include_zero=False)


def brute_affine(f: Poly, k: int, spec: FieldSpec, cap: int = DEFAULT_CAP) -> int:
    """Zeros of f over all of F_{q^k}^n, by enumeration."""
    _check_cap(spec, k, f.n, cap)
    if f.is_zero:
        return spec.q ** (k * f.n)
    return _count_zeros(f, ExtField(spec, k), include_zero=True)


def brute_counts(f: Poly, D: int, spec: FieldSpec, cap: int = DEFAULT_CAP) -> CountSeries:
    """Affine counts N_1 .. N_D, each by exhaustive enumeration."""
    for k in range(1, D + 1):
        _check_cap(spec, k, f.n, cap)
    return CountSeries(spec.q, tuple(brute_affine(f, k, spec, cap) for k in range(1, D + 1)))
