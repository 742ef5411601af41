"""Weight function and lattice-point index for the total-degree cone.

Exponent vectors r = (r_0, r_1, ..., r_n) index every power series and
matrix in the trace computation.  The weight w(r) = r_0 when
r_1 + ... + r_n <= d r_0 (and infinity outside that cone) measures which
dilation of the degree-d simplex contains r; series get truncated at a
weight bound and matrices are indexed by all points up to that bound,
ordered by weight with a lexicographic tie-break so every run produces the
same layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeCapExceeded


@dataclass(frozen=True)
class ConeCtx:
    n: int  # number of torus variables
    d: int  # total degree of the defining polynomial

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("need n >= 1 and d >= 1")


def weight(r, cc: ConeCtx):
    """r_0 if (r_1, ..., r_n) lies in the r_0-th dilation of the simplex."""
    return r[0] if sum(r[1:]) <= cc.d * r[0] else math.inf


def count_points(t: int, cc: ConeCtx) -> int:
    """Number of cone points of weight <= t, by the stars-and-bars closed form."""
    return sum(math.comb(cc.d * r0 + cc.n, cc.n) for r0 in range(t + 1))


def _tuples_sum_at_most(n: int, s: int):
    if n == 0:
        yield ()
        return
    for first in range(s + 1):
        for rest in _tuples_sum_at_most(n - 1, s - first):
            yield (first,) + rest


class MonomialIndex:
    """All exponent vectors of weight <= t, ordered by (weight, lex tail)."""

    __slots__ = ("cc", "t", "vecs", "pos", "_coords")

    def __init__(self, cc: ConeCtx, t: int, vecs: tuple):
        self.cc = cc
        self.t = t
        self.vecs = vecs
        self.pos = {v: i for i, v in enumerate(vecs)}
        self._coords = None

    def __len__(self) -> int:
        return len(self.vecs)

    def __getitem__(self, i: int):
        return self.vecs[i]

    def __contains__(self, v) -> bool:
        return v in self.pos

    def coords(self) -> np.ndarray:
        """(W, n+1) integer array of the vectors, cached; row i is vecs[i]."""
        if self._coords is None:
            self._coords = np.array(self.vecs, dtype=np.int64)
        return self._coords

    def __repr__(self) -> str:
        return f"MonomialIndex(n={self.cc.n}, d={self.cc.d}, t={self.t}, W={len(self)})"


def enumerate_points(t: int, cc: ConeCtx, size_cap: int | None = None) -> MonomialIndex:
    """Index of all weight-<= t points; refuses via the cap before allocating."""
    if t < 0:
        raise ValueError("weight bound must be >= 0")
    w = count_points(t, cc)
    if size_cap is not None and w > size_cap:
        raise SizeCapExceeded(w, size_cap)
    vecs = tuple(
        (r0,) + tail
        for r0 in range(t + 1)
        for tail in _tuples_sum_at_most(cc.n, cc.d * r0)
    )
    assert len(vecs) == w
    return MonomialIndex(cc, t, vecs)
