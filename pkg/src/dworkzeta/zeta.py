"""Counts to zeta functions: affine counts by torus decomposition, common
zeros of several polynomials by inclusion-exclusion, recovery of the rational
zeta function from a count series, and the Jacobian group order of a curve.

Polynomial coefficient lists run low-to-high with the constant term first.
All linear algebra is exact over the rationals; the systems here are tiny,
so fraction elimination beats any modular cleverness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .dwork import toric_run
from .errors import InexactDivision, NoSolution, NotACurveZeta, ValidationError
from .ffield import FieldSpec, Poly, poly_mul, poly_restrict


@dataclass(frozen=True)
class CountSeries:
    """Point counts N_1 .. N_D over the degree-k extensions of F_q."""

    q: int
    counts: tuple

    @property
    def depth(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class RationalFn:
    """Quotient of integer polynomials, coefficient tuples low to high."""

    num: tuple
    den: tuple


@dataclass(frozen=True)
class ZetaFn:
    """Zeta function r(T)/s(T): integer coefficients, constant terms 1, coprime."""

    num: tuple
    den: tuple


# -- counting ---------------------------------------------------------------------


def affine_count_detail(f: Poly, k: int, spec: FieldSpec, size_cap=None):
    """Affine zero count with the underlying toric runs, for reporting.

    Sums torus counts over all ways of pinning a subset of variables to zero.
    A restriction that vanishes identically contributes its whole torus; a
    nonzero constant contributes nothing; anything else goes through the
    trace formula.
    """
    if k < 1:
        raise ValidationError("extension degree k must be >= 1")
    n = f.n
    qk = spec.q ** k
    total = 0
    runs = []
    for rsize in range(n + 1):
        for S in combinations(range(1, n + 1), rsize):
            g = poly_restrict(f, S, spec)
            if g.is_zero:
                total += (qk - 1) ** (n - rsize)
            elif g.d == 0:
                continue
            else:
                run = toric_run(g, k, spec, size_cap=size_cap)
                total += run.count
                runs.append((S, run))
    return total, runs


def affine_count(f: Poly, k: int, spec: FieldSpec, size_cap=None) -> int:
    """Number of zeros of f in affine n-space over F_{q^k}."""
    return affine_count_detail(f, k, spec, size_cap)[0]


def variety_count(fs, k: int, spec: FieldSpec, size_cap=None) -> int:
    """Common zeros of f_1..f_r by inclusion-exclusion over products.

    A product that collapses to the zero polynomial vanishes everywhere and
    contributes q^{nk}.
    """
    if not fs:
        raise ValidationError("variety counting needs at least one polynomial")
    if k < 1:
        raise ValidationError("extension degree k must be >= 1")
    n = fs[0].n
    if any(g.n != n for g in fs):
        raise ValidationError("polynomials must share one variable set")
    qk = spec.q ** k
    total = 0
    for rsize in range(1, len(fs) + 1):
        sign = 1 if rsize % 2 else -1
        for S in combinations(range(len(fs)), rsize):
            prod = fs[S[0]]
            for i in S[1:]:
                prod = poly_mul(prod, fs[i], spec)
            if prod.is_zero:
                cnt = qk ** n
            else:
                cnt = affine_count(prod, k, spec, size_cap=size_cap)
            total += sign * cnt
    return total


# -- series and recovery ------------------------------------------------------------


def zeta_series(counts: CountSeries) -> list:
    """Coefficients z_0..z_D of exp(sum N_k T^k / k) via m z_m = sum N_k z_{m-k}."""
    z = [1]
    N = counts.counts
    for m in range(1, counts.depth + 1):
        s = sum(N[j - 1] * z[m - j] for j in range(1, m + 1))
        if s % m:
            raise InexactDivision(f"z_{m} is not an integer: {s}/{m}")
        z.append(s // m)
    return z


def series_counts(z) -> tuple:
    """Invert zeta_series: N_m = m z_m - sum_{j<m} N_j z_{m-j}."""
    out = []
    for m in range(1, len(z)):
        s = m * z[m] - sum(out[j - 1] * z[m - j] for j in range(1, m))
        out.append(s)
    return tuple(out)


def expand_series(num, den, depth: int) -> list:
    """Power-series coefficients of num/den through T^depth (den[0] must be 1)."""
    if not den or den[0] != 1:
        raise ValidationError("denominator must have constant term 1")
    z = []
    for m in range(depth + 1):
        c = Fraction(num[m]) if m < len(num) else Fraction(0)
        for i in range(1, min(m, len(den) - 1) + 1):
            c -= den[i] * z[m - i]
        z.append(c)
    return z


def default_bounds(n: int, d: int):
    """Unconditional degree bounds (2^{4n+4} d^n, same) for numerator and
    denominator; astronomically safe, so callers usually override."""
    if n < 1 or d < 1:
        raise ValidationError("bounds need n >= 1 and d >= 1")
    B = 2 ** (4 * n + 4) * d ** n
    return B, B


def _solve_denominator(z, D1: int, d2: int):
    """Solve for s = 1 + s_1 T + ... + s_{d2} T^{d2} with (s z)_m = 0 for
    D1 < m <= D1 + d2.  Returns Fraction coefficients, or None if the
    square system is singular."""
    if d2 == 0:
        return (Fraction(1),)
    rows = []
    rhs = []
    for m in range(D1 + 1, D1 + d2 + 1):
        rows.append([Fraction(z[m - i]) if m - i >= 0 else Fraction(0)
                     for i in range(1, d2 + 1)])
        rhs.append(Fraction(-z[m]))
    # exact Gaussian elimination with partial pivoting
    for col in range(d2):
        piv = next((r for r in range(col, d2) if rows[r][col] != 0), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        rhs[col] *= inv
        for r in range(d2):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[col])]
                rhs[r] -= factor * rhs[col]
    return (Fraction(1),) + tuple(rhs)


def _poly_trim(u):
    u = list(u)
    while len(u) > 1 and u[-1] == 0:
        u.pop()
    return tuple(u) if u else (0,)


def _poly_conv(u, v):
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] += a * b
    return _poly_trim(out)


def _poly_divmod(u, v):
    u = [Fraction(c) for c in u]
    dv = len(v) - 1
    lead = Fraction(v[-1])
    quot = [Fraction(0)] * max(len(u) - dv, 1)
    while len(u) - 1 >= dv and any(u):
        if u[-1] == 0:
            u.pop()
            continue
        shift = len(u) - 1 - dv
        c = u[-1] / lead
        quot[shift] = c
        for i in range(dv + 1):
            u[shift + i] -= c * v[i]
        u.pop()
    return _poly_trim(quot), _poly_trim(u)


def _poly_gcd(u, v):
    u, v = _poly_trim(u), _poly_trim(v)
    while v != (0,):
        _, rem = _poly_divmod(u, v)
        u, v = v, rem
    return u


def _lowest_terms(num, den):
    """Cancel the rational gcd, keeping both constant terms at 1."""
    g = _poly_gcd(num, den)
    if len(g) > 1:
        g = tuple(Fraction(c) / g[0] for c in g)  # g(0) != 0: it divides den
        num, _ = _poly_divmod(num, g)
        den, _ = _poly_divmod(den, g)
    return num, den


def _as_int_poly(u):
    out = []
    for c in u:
        c = Fraction(c)
        if c.denominator != 1:
            return None
        out.append(int(c))
    return _poly_trim(out)


def recover_zeta(counts: CountSeries, D1: int, D2: int) -> ZetaFn:
    """Rational function r/s with deg r <= D1, deg s <= D2 whose logarithmic
    expansion reproduces every input count; singular systems shrink the
    denominator bound until one solves."""
    if D1 < 0 or D2 < 0:
        raise ValidationError("degree bounds must be >= 0")
    if counts.depth < D1 + D2:
        raise ValidationError(
            f"need counts through {D1 + D2}, have {counts.depth}"
        )
    z = zeta_series(counts)
    for d2 in range(D2, -1, -1):
        s = _solve_denominator(z, D1, d2)
        if s is None:
            continue
        r = tuple(
            sum(s[i] * z[m - i] for i in range(0, min(m, d2) + 1))
            for m in range(D1 + 1)
        )
        num, den = _lowest_terms(_poly_trim(r), _poly_trim(s))
        num, den = _as_int_poly(num), _as_int_poly(den)
        if num is None or den is None or num[0] != 1 or den[0] != 1:
            continue
        zz = expand_series(num, den, counts.depth)
        if any(c.denominator != 1 for c in zz):
            continue
        if series_counts([int(c) for c in zz]) == tuple(counts.counts):
            return ZetaFn(num=num, den=den)
    raise NoSolution(
        f"no rational function with degrees <= ({D1},{D2}) matches the counts"
    )


# -- Jacobian order ------------------------------------------------------------------


def _euler_phi(s: int) -> int:
    out, m, f = 1, s, 2
    while f * f <= m:
        if m % f == 0:
            pk = 1
            while m % f == 0:
                m //= f
                pk *= f
            out *= pk - pk // f
        f += 1
    if m > 1:
        out *= m - 1
    return out


def _strip_cyclotomic(u):
    """Divide out every factor shared with some T^s - 1, phi(s) <= deg u,
    re-scanning until a full pass removes nothing."""
    u = tuple(Fraction(c) for c in u)
    changed = True
    while changed:
        changed = False
        deg = len(u) - 1
        if deg < 1:
            break
        for s in range(1, 2 * deg * deg + 2):
            if _euler_phi(s) > deg:
                continue
            ts = (Fraction(-1),) + (Fraction(0),) * (s - 1) + (Fraction(1),)
            g = _poly_gcd(u, ts)
            if len(g) > 1:
                g = tuple(c / g[0] for c in g)
                u, _ = _poly_divmod(u, g)
                changed = True
                break
    return u


def jacobian_detail(zv: ZetaFn, q: int):
    """Residual numerator P and its value P(1) after clearing 1/(1-qT) and
    all cyclotomic content from the curve's zeta function."""
    num = _poly_conv(zv.num, (1, -q))
    num, den = _lowest_terms(num, zv.den)
    num = _strip_cyclotomic(num)
    den = _strip_cyclotomic(den)
    if _poly_trim(den) != (1,):
        raise NotACurveZeta(f"residual denominator {den} is nontrivial")
    P = _as_int_poly(num)
    if P is None or P[0] != 1:
        raise NotACurveZeta(f"residual numerator {num} is not integral with P(0)=1")
    order = sum(P)
    if order <= 0:
        raise NotACurveZeta(f"P(1) = {order} is not a group order")
    return P, order


def jacobian_order(zv: ZetaFn, q: int) -> int:
    """Order of the Jacobian group: P(1) for the residual numerator P."""
    return jacobian_detail(zv, q)[1]
