"""Medians on the hypercube Q_r viewed as the Boolean lattice ``boolean(r)``.

Vertices are bit-packed integers, coordinate i being bit i-1.  They print as
bit strings with coordinate 1 first, so ``110`` is the integer 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import oplus
from .errors import DimensionMismatch, VerificationFailed
from .fntable import FnTable, coords
from .lattice import Lattice, bitstring, boolean
from .terms import Chi, Ext, Join, Meet, Term, Var, term_to_table


@dataclass(frozen=True)
class Vertex:
    bits: int
    r: int

    def __post_init__(self):
        if self.r < 0 or not 0 <= self.bits < (1 << self.r):
            raise DimensionMismatch(f"{self.bits} is not a vertex of Q_{self.r}")

    @classmethod
    def parse(cls, text: str) -> "Vertex":
        if any(ch not in "01" for ch in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(sum(1 << i for i, ch in enumerate(text) if ch == "1"), len(text))

    @classmethod
    def from_coords(cls, coords_: tuple[int, ...]) -> "Vertex":
        return cls(sum(1 << i for i, c in enumerate(coords_) if c), len(coords_))

    def coords(self) -> tuple[int, ...]:
        return tuple(self.bits >> i & 1 for i in range(self.r))

    def __str__(self) -> str:
        return bitstring(self.bits, self.r)


def _same_r(*vs: Vertex) -> int:
    rs = {v.r for v in vs}
    if len(rs) != 1:
        raise DimensionMismatch(f"vertices from different hypercubes: r in {sorted(rs)}")
    return rs.pop()


def median_rule(x: Vertex, y: Vertex, z: Vertex) -> Vertex:
    """Coordinatewise two-out-of-three majority."""
    r = _same_r(x, y, z)
    return Vertex((x.bits & y.bits) | (y.bits & z.bits) | (x.bits & z.bits), r)


def median_by_rounding(x: Vertex, y: Vertex, z: Vertex) -> Vertex:
    """Per coordinate, the nearest integer to (x_i + y_i + z_i) / 3."""
    _same_r(x, y, z)
    w = [int(np.floor((a + b + c) / 3 + 0.5)) for a, b, c in zip(x.coords(), y.coords(), z.coords())]
    return Vertex.from_coords(tuple(w))


def hamming(x: Vertex, y: Vertex) -> int:
    _same_r(x, y)
    return (x.bits ^ y.bits).bit_count()


def distance_sum(w: Vertex, x: Vertex, y: Vertex, z: Vertex) -> int:
    return hamming(w, x) + hamming(w, y) + hamming(w, z)


def median_is_optimal(x: Vertex, y: Vertex, z: Vertex) -> bool:
    """True iff the majority vertex is the unique minimiser of the distance sum."""
    r = _same_r(x, y, z)
    sums = [distance_sum(Vertex(v, r), x, y, z) for v in range(1 << r)]
    best = min(sums)
    winners = [v for v, s in enumerate(sums) if s == best]
    return winners == [median_rule(x, y, z).bits]


def median_table(r: int) -> FnTable:
    lat = boolean(r)
    x, y, z = coords(lat.size, 3)
    return FnTable(lat, 3, (x & y) | (y & z) | (x & z))


def f_v(v: Vertex, lattice: Lattice | None = None) -> FnTable:
    """Binary table x, y -> median(v, x, y) on ``boolean(v.r)``."""
    lat = lattice if lattice is not None else boolean(v.r)
    if lat.size != 1 << v.r:
        raise DimensionMismatch(f"vertex of Q_{v.r} on a lattice of size {lat.size}")
    x, y = coords(lat.size, 2)
    return FnTable(lat, 2, (v.bits & x) | (x & y) | (v.bits & y))


def oplus_from_fv_term(lattice: Lattice) -> Term:
    """fv(chi[bottom](x1 \\/ x2), chi[top](x1 /\\ x2))."""
    x1, x2 = Var(1), Var(2)
    return Ext("fv", (Chi(lattice.bottom, Join(x1, x2)), Chi(lattice.top, Meet(x1, x2))))


def oplus_from_fv(v: Vertex, lattice: Lattice | None = None) -> tuple[Term, bool]:
    """Build the f_v term that should equal oplus_v and check it exhaustively."""
    lat = lattice if lattice is not None else boolean(v.r)
    term = oplus_from_fv_term(lat)
    got = term_to_table(term, lat, 2, {"fv": f_v(v, lat)})
    if got != oplus(lat, v.bits):
        raise VerificationFailed(f"fv term differs from oplus[{v}] on Q_{v.r}")
    return term, True


def vertices(r: int) -> list[Vertex]:
    return [Vertex(b, r) for b in range(1 << r)]
