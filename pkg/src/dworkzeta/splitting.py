"""Coefficients of the splitting function theta(z) = exp(pi z) exp(-pi z^p).

theta linearizes additive characters: its coefficients lambda_r multiply the
Teichmueller-twisted monomials that make up the exponential-sum matrix.  Only
lambda_0 .. lambda_t_tilde matter mod p^N, where t_tilde = ceil(p^2 N/(p-1)) - 1:
past that the coefficients have valuation >= N.

The exp(pi z) recurrence e_r = e_{r-1} pi / r divides by r, which is not
invertible mod p^N when p | r.  Work therefore happens at a guard precision
N_g = N + ceil(t_tilde/(p-1)) + 1 that absorbs the cumulative v_p(r!) loss,
with the p-part of each division performed as exact integer division.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PrecisionLoss
from .padic import PadicCtx, RElem, r_add


def truncation_degree(p: int, N: int) -> int:
    """Largest power series degree that matters mod p^N: ceil(p^2 N/(p-1)) - 1."""
    return -(-(p * p * N) // (p - 1)) - 1


def guard_precision(p: int, N: int) -> int:
    t = truncation_degree(p, N)
    return N + -(-t // (p - 1)) + 1


@dataclass(frozen=True)
class ThetaTable:
    ctx: PadicCtx
    lambdas: tuple  # RElem coefficients lambda_0 .. lambda_t_tilde

    @property
    def t_tilde(self) -> int:
        return len(self.lambdas) - 1


# exp(pi z) coefficients live in R_1 = Z_p[pi]: vectors of length p-1 on the
# pi-power basis, with pi^(p-1) folding to -p


def _pivec_mul(u, v, p, mod):
    rows = p - 1
    out = [0] * rows
    for j1, x in enumerate(u):
        if x:
            for j2, y in enumerate(v):
                if y:
                    j = j1 + j2
                    t = x * y
                    if j >= rows:
                        j -= rows
                        t = -p * t
                    out[j] = (out[j] + t) % mod
    return out


def _pivec_mul_pi(u, p, mod):
    rows = p - 1
    out = [0] * rows
    for j, x in enumerate(u):
        if j + 1 >= rows:
            out[0] = (-p * x) % mod
        else:
            out[j + 1] = x % mod
    return out


def _pivec_div_exact(u, r, p, mod):
    """Divide by r = p^v * unit: exact division by p^v, modular inverse for the rest."""
    v = 0
    while r % p == 0:
        r //= p
        v += 1
    pv = p ** v
    out = []
    uinv = pow(r, -1, mod)
    for x in u:
        if x % pv:
            raise PrecisionLoss(f"entry {x} not divisible by p^{v}")
        out.append((x // pv) * uinv % mod)
    return out


def compute_theta(ctx: PadicCtx) -> ThetaTable:
    """Power series coefficients of theta mod p^N, up to degree t_tilde."""
    p, N = ctx.p, ctx.N
    t = truncation_degree(p, N)
    mod_g = p ** guard_precision(p, N)

    e = [[1] + [0] * (p - 2)]
    for r in range(1, t + 1):
        e.append(_pivec_div_exact(_pivec_mul_pi(e[r - 1], p, mod_g), r, p, mod_g))

    # lambda_m = sum over pr <= m of (-1)^r e_r e_{m-pr}
    mod = ctx.mod
    rows = p - 1
    lambdas = []
    for m in range(t + 1):
        acc = [0] * rows
        for r in range(m // p + 1):
            term = _pivec_mul(e[r], e[m - p * r], p, mod_g)
            sgn = -1 if r & 1 else 1
            for j in range(rows):
                acc[j] += sgn * term[j]
        cols = tuple((x % mod,) + (0,) * (ctx.a - 1) for x in acc)
        lambdas.append(RElem(ctx, cols))
    return ThetaTable(ctx, tuple(lambdas))


def theta_at_one(table: ThetaTable) -> RElem:
    """Sum of all coefficients: a primitive p-th root of unity mod p^N."""
    ctx = table.ctx
    total = ctx.zero()
    for lam in table.lambdas:
        total = r_add(total, lam, ctx)
    return total
