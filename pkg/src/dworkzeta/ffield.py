"""Finite fields F_q = F_p[y]/(h) and sparse multivariate polynomials over them.

Field elements are plain tuples of ints (coordinates on 1, y, ..., y^{a-1}),
kept deliberately lightweight because the brute-force oracle evaluates
polynomials at every point of a torus.  All arithmetic lives on FieldSpec.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DivisionByZero,
    NoIrreducibleFound,
    NotPrime,
    ParseError,
    Reducible,
    VariableOutOfRange,
)

FqElem = tuple  # length-a tuple of residues mod p


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit integers."""
    if p < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % small == 0:
            return p == small
    d = p - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(base, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q = F_p[y]/(h), q = p^a.

    h is the monic irreducible modulus, coefficient list low-to-high of
    length a+1 with h[a] = 1.  Elements are length-a tuples mod p.
    """

    p: int
    a: int
    h: tuple

    @property
    def q(self) -> int:
        return self.p ** self.a

    @property
    def zero(self) -> FqElem:
        return (0,) * self.a

    @property
    def one(self) -> FqElem:
        return (1,) + (0,) * (self.a - 1)

    def elem(self, seq) -> FqElem:
        """Validate and normalize a coefficient sequence into an element."""
        coeffs = tuple(c % self.p for c in seq)
        if len(coeffs) > self.a:
            raise ValueError(f"element needs at most {self.a} coordinates")
        return coeffs + (0,) * (self.a - len(coeffs))

    def from_int(self, c: int) -> FqElem:
        return (c % self.p,) + (0,) * (self.a - 1)

    def elements(self):
        """All q elements, constant coordinate fastest-varying."""
        for idx in range(self.q):
            rest = idx
            coeffs = []
            for _ in range(self.a):
                coeffs.append(rest % self.p)
                rest //= self.p
            yield tuple(coeffs)

    def add(self, x: FqElem, y: FqElem) -> FqElem:
        p = self.p
        return tuple((u + v) % p for u, v in zip(x, y))

    def sub(self, x: FqElem, y: FqElem) -> FqElem:
        p = self.p
        return tuple((u - v) % p for u, v in zip(x, y))

    def neg(self, x: FqElem) -> FqElem:
        p = self.p
        return tuple(-u % p for u in x)

    def mul(self, x: FqElem, y: FqElem) -> FqElem:
        p, a = self.p, self.a
        if a == 1:
            return (x[0] * y[0] % p,)
        prod = [0] * (2 * a - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    prod[i + j] += u * v
        # reduce by h: y^a = -(h[0] + h[1] y + ... + h[a-1] y^{a-1})
        for m in range(2 * a - 2, a - 1, -1):
            c = prod[m] % p
            if c:
                prod[m] = 0
                for j in range(a):
                    prod[m - a + j] -= c * self.h[j]
        return tuple(c % p for c in prod[:a])

    def inv(self, x: FqElem) -> FqElem:
        """Inverse via extended gcd of the representing polynomial with h."""
        if all(c == 0 for c in x):
            raise DivisionByZero("inverse of zero in F_q")
        p = self.p
        if self.a == 1:
            return (pow(x[0], p - 2, p),)
        # extended Euclid in F_p[y] on (x, h)
        r0, r1 = list(self.h), [c % p for c in x]
        s0, s1 = [0], [1]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 1:
                c_inv = pow(r1[0], p - 2, p)
                return self.elem([c * c_inv for c in s1])
            q, r = _polydivmod_fp(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _polysub_fp(s0, _polymul_fp(q, s1, p), p)

    def pow(self, x: FqElem, e: int) -> FqElem:
        result = self.one
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius(self, x: FqElem) -> FqElem:
        return self.pow(x, self.p)

    def is_zero(self, x: FqElem) -> bool:
        return all(c == 0 for c in x)


def _polysub_fp(u, v, p):
    n = max(len(u), len(v))
    u = u + [0] * (n - len(u))
    v = v + [0] * (n - len(v))
    return [(a - b) % p for a, b in zip(u, v)]


def _polymul_fp(u, v, p):
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] = (out[i + j] + a * b) % p
    return out


def _polydivmod_fp(num, den, p):
    num = [c % p for c in num]
    den = list(den)
    while den and den[-1] == 0:
        den.pop()
    if len(num) < len(den):
        return [0], num
    dlead_inv = pow(den[-1], p - 2, p)
    quot = [0] * max(1, len(num) - len(den) + 1)
    rem = list(num)
    for i in range(len(num) - len(den), -1, -1):
        c = rem[i + len(den) - 1] * dlead_inv % p
        if c:
            quot[i] = c
            for j, b in enumerate(den):
                rem[i + j] = (rem[i + j] - c * b) % p
    return quot, rem[: len(den) - 1] or [0]


def make_field(p: int, a: int, h_opt=None) -> FieldSpec:
    """Build F_{p^a}; if h_opt absent, pick the lexicographically first
    monic irreducible of degree a (constant term fastest-varying)."""
    if not is_prime(p):
        raise NotPrime(f"p = {p} is not prime")
    if a < 1:
        raise ValueError("extension degree a must be >= 1")
    if h_opt is not None:
        h = tuple(c % p for c in h_opt)
        if len(h) != a + 1 or h[a] != 1:
            raise Reducible(f"h must be monic of degree {a}")
        spec1 = FieldSpec(p, 1, (0, 1))
        if not is_irreducible([(c,) for c in h], spec1):
            raise Reducible(f"h = {list(h)} is reducible over F_{p}")
        return FieldSpec(p, a, h)
    spec1 = FieldSpec(p, 1, (0, 1))
    # counters in lexicographic order of (c_{a-1}, ..., c_1, c_0): we want
    # the constant term to vary fastest, so iterate it innermost.
    for idx in range(p ** a):
        coeffs = []
        rest = idx
        for _ in range(a):
            coeffs.append(rest % p)
            rest //= p
        # coeffs[0] is the constant term and varies fastest in idx
        h = tuple(coeffs) + (1,)
        g = [(c,) for c in h]
        if is_irreducible(g, spec1):
            return FieldSpec(p, a, h)
    raise NoIrreducibleFound(f"no irreducible of degree {a} over F_{p}")


# ---------------------------------------------------------------------------
# univariate polynomials over F_q (lists of FqElem, low-to-high)


def _upoly_trim(g):
    while len(g) > 1 and all(c == 0 for c in g[-1]):
        g = g[:-1]
    return g


def _upoly_mulmod(u, v, g, spec):
    a_len = len(g) - 1
    out = [spec.zero] * (len(u) + len(v) - 1)
    for i, cu in enumerate(u):
        if not spec.is_zero(cu):
            for j, cv in enumerate(v):
                out[i + j] = spec.add(out[i + j], spec.mul(cu, cv))
    # reduce by monic g
    for m in range(len(out) - 1, a_len - 1, -1):
        c = out[m]
        if not spec.is_zero(c):
            out[m] = spec.zero
            for j in range(a_len):
                out[m - a_len + j] = spec.sub(out[m - a_len + j], spec.mul(c, g[j]))
    out = out[:a_len]
    return out + [spec.zero] * (a_len - len(out))


def _upoly_powmod(u, e, g, spec):
    a_len = len(g) - 1
    result = [spec.one] + [spec.zero] * (a_len - 1)
    base = _upoly_mulmod(u, [spec.one], g, spec)
    while e:
        if e & 1:
            result = _upoly_mulmod(result, base, g, spec)
        base = _upoly_mulmod(base, base, g, spec)
        e >>= 1
    return result


def _upoly_gcd(u, v, spec):
    u, v = _upoly_trim(list(u)), _upoly_trim(list(v))
    while not (len(v) == 1 and spec.is_zero(v[0])):
        u, v = v, _upoly_mod(u, v, spec)
    return u


def _upoly_mod(u, v, spec):
    v = _upoly_trim(list(v))
    u = _upoly_trim(list(u))
    if len(u) < len(v):
        return u
    lead_inv = spec.inv(v[-1])
    rem = list(u)
    for i in range(len(rem) - len(v), -1, -1):
        c = spec.mul(rem[i + len(v) - 1], lead_inv)
        if not spec.is_zero(c):
            for j, b in enumerate(v):
                rem[i + j] = spec.sub(rem[i + j], spec.mul(c, b))
    return _upoly_trim(rem[: len(v) - 1] or [spec.zero])


def _prime_factors(k):
    out = []
    m = k
    f = 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def is_irreducible(g, spec: FieldSpec) -> bool:
    """Monic g over F_q of degree k is irreducible iff z^{q^k} = z mod g and
    gcd(z^{q^{k/l}} - z, g) = 1 for every prime l dividing k."""
    g = list(g)
    k = len(g) - 1
    if k < 1:
        raise ValueError("degree must be >= 1")
    if k == 1:
        return True
    q = spec.q
    z = [spec.zero, spec.one]
    zq_k = _upoly_powmod(z, q ** k, g, spec)
    diff = list(zq_k)
    diff[1] = spec.sub(diff[1], spec.one)
    if not all(spec.is_zero(c) for c in diff):
        return False
    for ell in _prime_factors(k):
        zq = _upoly_powmod(z, q ** (k // ell), g, spec)
        diff = list(zq)
        diff[1] = spec.sub(diff[1], spec.one)
        gcd = _upoly_gcd(diff, g, spec)
        if len(_upoly_trim(gcd)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# multivariate polynomials


@dataclass(frozen=True)
class Poly:
    """Sparse multivariate polynomial: exponent vector -> nonzero FqElem."""

    n: int
    terms: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))


def poly_from_terms(n: int, items, spec: FieldSpec) -> Poly:
    """Canonicalize: combine like terms, drop zeros."""
    acc = {}
    for e, c in items:
        e = tuple(int(x) for x in e)
        if len(e) != n or any(x < 0 for x in e):
            raise ValueError(f"bad exponent vector {e}")
        c = spec.elem(c)
        if e in acc:
            acc[e] = spec.add(acc[e], c)
        else:
            acc[e] = c
    return Poly(n, {e: c for e, c in acc.items() if not spec.is_zero(c)})


def poly_mul(f: Poly, g: Poly, spec: FieldSpec) -> Poly:
    if f.n != g.n:
        raise ValueError("variable counts differ")
    items = []
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            items.append((tuple(a + b for a, b in zip(e1, e2)), spec.mul(c1, c2)))
    return poly_from_terms(f.n, items, spec)


def poly_restrict(f: Poly, zero_vars, spec: FieldSpec) -> Poly:
    """Set the 1-based variables in zero_vars to 0 and drop them, keeping
    the relative order of the survivors."""
    zero_set = set(zero_vars)
    keep = [i for i in range(f.n) if i + 1 not in zero_set]
    items = []
    for e, c in f.terms.items():
        if all(e[i - 1] == 0 for i in zero_set):
            items.append((tuple(e[i] for i in keep), c))
    return poly_from_terms(len(keep), items, spec)


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self):
        ch = self.peek()
        self.pos += 1
        return ch

    def read_int(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected an integer", start)
        return int(self.text[start:self.pos])


def parse_poly(text: str, n: int, spec: FieldSpec) -> Poly:
    """Parse `term ('+' term)*` where term is `coeff ('*' var)*` or
    `var ('*' var)*`, var is `xINDEX('^'EXP)?`, coeff an INT or `{c0,...}`."""
    sc = _Scanner(text)
    items = []
    while True:
        items.append(_parse_term(sc, n, spec))
        sc.skip_ws()
        if sc.pos >= len(sc.text):
            break
        if sc.peek() != "+":
            raise ParseError(f"expected '+' or end, got {sc.peek()!r}", sc.pos)
        sc.take()
    return poly_from_terms(n, items, spec)


def _parse_var(sc: _Scanner, n: int):
    sc.take()  # the 'x'
    idx = sc.read_int()
    if not 1 <= idx <= n:
        raise VariableOutOfRange(f"variable x{idx} outside 1..{n}")
    exp = 1
    if sc.peek() == "^":
        sc.take()
        exp = sc.read_int()
    return idx, exp


def _parse_term(sc: _Scanner, n: int, spec: FieldSpec):
    sc.skip_ws()
    if sc.pos >= len(sc.text):
        raise ParseError("expected a term", sc.pos)
    ch = sc.peek()
    expo = [0] * n
    if ch == "x":
        coeff = spec.one
        idx, exp = _parse_var(sc, n)
        expo[idx - 1] += exp
    elif ch == "{":
        sc.take()
        coords = [sc.read_int()]
        while sc.peek() == ",":
            sc.take()
            coords.append(sc.read_int())
        if sc.peek() != "}":
            raise ParseError("expected '}'", sc.pos)
        sc.take()
        if len(coords) > spec.a:
            raise ParseError(f"coefficient vector longer than a = {spec.a}", sc.pos)
        coeff = spec.elem(coords)
    elif ch.isdigit():
        coeff = spec.from_int(sc.read_int())
    else:
        raise ParseError(f"expected coefficient or variable, got {ch!r}", sc.pos)
    while sc.peek() == "*":
        sc.take()
        if sc.peek() != "x":
            raise ParseError("expected a variable after '*'", sc.pos)
        idx, exp = _parse_var(sc, n)
        expo[idx - 1] += exp
    return tuple(expo), coeff


def render_poly(f: Poly, spec: FieldSpec) -> str:
    """Canonical text form; parse_poly(render_poly(f)) == f."""
    if f.is_zero:
        return "0"
    parts = []
    for e in sorted(f.terms):
        c = f.terms[e]
        vars_part = "*".join(
            f"x{i+1}^{x}" if x > 1 else f"x{i+1}" for i, x in enumerate(e) if x > 0
        )
        if any(c[i] for i in range(1, spec.a)):
            coeff_part = "{" + ",".join(str(x) for x in c) + "}"
        elif c[0] == 1 and vars_part:
            coeff_part = ""
        else:
            coeff_part = str(c[0])
        if coeff_part and vars_part:
            parts.append(coeff_part + "*" + vars_part)
        else:
            parts.append(coeff_part or vars_part)
    return " + ".join(parts)
