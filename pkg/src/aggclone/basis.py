"""Generating aggregation functions and the join/meet decompositions.

``chi(a)`` and ``mu(a)`` are unary, ``oplus(b)`` binary.  For an aggregation
function f of arity n, each tuple a strictly between the bounds tuples gives a
building block h_a (joined over all a, it rebuilds f) and a dual block g_a
(met over all a, it rebuilds f as well).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ArityTooSmall, InvalidIndexTuple, NotAggregation
from .fntable import FnTable, coords, decode, encode_many, is_aggregation, projection
from .lattice import Elem, Lattice


@dataclass(frozen=True)
class BasisDescriptor:
    kind: str
    parameter: Optional[Elem] = None

    def __post_init__(self):
        if self.kind not in ("chi", "mu", "oplus", "meet", "join"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if (self.parameter is not None) != (self.kind in ("chi", "mu", "oplus")):
            raise ValueError(f"{self.kind} {'needs' if self.parameter is None else 'takes no'} parameter")

    def table(self, lattice: Lattice) -> FnTable:
        if self.kind == "chi":
            return chi(lattice, self.parameter)
        if self.kind == "mu":
            return mu(lattice, self.parameter)
        if self.kind == "oplus":
            return oplus(lattice, self.parameter)
        return meet_fn(lattice) if self.kind == "meet" else join_fn(lattice)

    def label(self, lattice: Lattice) -> str:
        if self.parameter is None:
            return self.kind
        return f"{self.kind}[{lattice.names[self.parameter]}]"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=4096)
def _chi_values(lattice: Lattice, a: Elem) -> np.ndarray:
    x = np.arange(lattice.size)
    return _readonly(np.where(lattice.leq[a] & (x != lattice.bottom), lattice.top, lattice.bottom))


@lru_cache(maxsize=4096)
def _mu_values(lattice: Lattice, a: Elem) -> np.ndarray:
    x = np.arange(lattice.size)
    return _readonly(np.where(lattice.leq[:, a] & (x != lattice.top), lattice.bottom, lattice.top))


@lru_cache(maxsize=4096)
def _oplus_grid(lattice: Lattice, b: Elem) -> np.ndarray:
    g = np.full((lattice.size, lattice.size), b, dtype=np.int32)
    g[lattice.top, lattice.top] = lattice.top
    g[lattice.bottom, lattice.bottom] = lattice.bottom
    return _readonly(g)


def chi(lattice: Lattice, a: Elem) -> FnTable:
    """Top on the principal filter of a (minus bottom), bottom elsewhere."""
    return FnTable(lattice, 1, _chi_values(lattice, a))


def mu(lattice: Lattice, a: Elem) -> FnTable:
    """Bottom on the principal ideal of a (minus top), top elsewhere."""
    return FnTable(lattice, 1, _mu_values(lattice, a))


def oplus(lattice: Lattice, b: Elem) -> FnTable:
    """Top on (top, top), bottom on (bottom, bottom), b everywhere else."""
    return FnTable(lattice, 2, _oplus_grid(lattice, b))


def meet_fn(lattice: Lattice) -> FnTable:
    return FnTable(lattice, 2, lattice.meet)


def join_fn(lattice: Lattice) -> FnTable:
    return FnTable(lattice, 2, lattice.join)


def oplus_fold(lattice: Lattice, b: Elem, xs: Sequence[Elem]) -> Elem:
    """Left fold of oplus_b over ``xs`` (at least two arguments)."""
    if len(xs) < 2:
        raise ValueError("the fold needs at least two arguments")
    g = _oplus_grid(lattice, b)
    acc = xs[0]
    for x in xs[1:]:
        acc = int(g[acc, x])
    return int(acc)


def standard_basis(lattice: Lattice) -> list[BasisDescriptor]:
    """meet, join, chi_a and oplus_b for every element: at most 2n+2 members."""
    out = [BasisDescriptor("meet"), BasisDescriptor("join")]
    out += [BasisDescriptor("chi", a) for a in range(lattice.size)]
    out += [BasisDescriptor("oplus", b) for b in range(lattice.size)]
    return out


def dual_basis(lattice: Lattice) -> list[BasisDescriptor]:
    out = [BasisDescriptor("meet"), BasisDescriptor("join")]
    out += [BasisDescriptor("mu", a) for a in range(lattice.size)]
    out += [BasisDescriptor("oplus", b) for b in range(lattice.size)]
    return out


# decompositions -------------------------------------------------------------


def nonzero_indices(lattice: Lattice, a: Sequence[Elem]) -> list[int]:
    """J_a: 1-based positions where a is not bottom."""
    return [i + 1 for i, x in enumerate(a) if x != lattice.bottom]


def nontop_indices(lattice: Lattice, a: Sequence[Elem]) -> list[int]:
    """The dual index set: 1-based positions where a is not top."""
    return [i + 1 for i, x in enumerate(a) if x != lattice.top]


def interior_tuples(lattice: Lattice, arity: int) -> list[tuple[Elem, ...]]:
    """L^n minus the bounds tuples, in ascending code order."""
    return list(_interior(lattice.size, arity))


@lru_cache(maxsize=64)
def _interior(size: int, arity: int) -> tuple[tuple[Elem, ...], ...]:
    return tuple(decode(c, arity, size) for c in range(1, size**arity - 1))


def _check_index_tuple(lattice: Lattice, f: FnTable, a: Sequence[Elem]) -> tuple[Elem, ...]:
    a = tuple(int(x) for x in a)
    if len(a) != f.arity:
        raise InvalidIndexTuple(f"tuple {a} does not have arity {f.arity}")
    if lattice.size == 1 or all(x == lattice.bottom for x in a) or all(x == lattice.top for x in a):
        raise InvalidIndexTuple(f"{a} is a bounds tuple")
    return a


@lru_cache(maxsize=4096)
def _fold_values(lattice: Lattice, b: Elem, arity: int) -> np.ndarray:
    grid = coords(lattice.size, arity)
    g = _oplus_grid(lattice, b)
    if arity == 1:
        return _readonly(g[grid[0], grid[0]])
    acc = grid[0]
    for i in range(1, arity):
        acc = g[acc, grid[i]]
    return _readonly(acc)


def h_table(lattice: Lattice, f: FnTable, a: Sequence[Elem]) -> FnTable:
    """Meet of chi_{a_i}(x_i) over non-bottom positions with the oplus_{f(a)} fold."""
    a = _check_index_tuple(lattice, f, a)
    grid = coords(lattice.size, f.arity)
    acc = np.full(grid.shape[1], lattice.top, dtype=np.int32)
    for i in nonzero_indices(lattice, a):
        acc = lattice.meet[acc, _chi_values(lattice, a[i - 1])[grid[i - 1]]]
    acc = lattice.meet[acc, _fold_values(lattice, f(*a), f.arity)]
    return FnTable(lattice, f.arity, acc)


def g_table(lattice: Lattice, f: FnTable, a: Sequence[Elem]) -> FnTable:
    """Join of mu_{a_i}(x_i) over non-top positions with the oplus_{f(a)} fold."""
    a = _check_index_tuple(lattice, f, a)
    grid = coords(lattice.size, f.arity)
    acc = np.full(grid.shape[1], lattice.bottom, dtype=np.int32)
    for i in nontop_indices(lattice, a):
        acc = lattice.join[acc, _mu_values(lattice, a[i - 1])[grid[i - 1]]]
    acc = lattice.join[acc, _fold_values(lattice, f(*a), f.arity)]
    return FnTable(lattice, f.arity, acc)


class Decomposition(NamedTuple):
    parts: list[tuple[tuple[Elem, ...], FnTable]]
    combined: FnTable


def _block_matrix(f: FnTable, dual: bool) -> tuple[list[tuple[Elem, ...]], np.ndarray]:
    """All h_a (or g_a) tables at once: one row per interior tuple a."""
    lat, n = f.lattice, f.arity
    tuples = interior_tuples(lat, n)
    if not tuples:
        return tuples, np.empty((0, lat.size**n), dtype=np.int32)
    a = np.array(tuples, dtype=np.int64)  # (k, n)
    grid = coords(lat.size, n)
    if dual:
        unit = np.array([_mu_values(lat, x) for x in range(lat.size)])
        op, skip = lat.join, lat.top
    else:
        unit = np.array([_chi_values(lat, x) for x in range(lat.size)])
        op, skip = lat.meet, lat.bottom
    neutral = lat.bottom if dual else lat.top
    acc = np.full((len(tuples), grid.shape[1]), neutral, dtype=np.int32)
    for i in range(n):
        guard = unit[a[:, i][:, None], grid[i][None, :]]
        guard[a[:, i] == skip] = neutral
        acc = op[acc, guard]
    folds = np.array([_fold_values(lat, b, n) for b in range(lat.size)])
    acc = op[acc, folds[f.values[encode_many(list(a.T), lat.size)]]]
    return tuples, acc


def _decompose(f: FnTable, dual: bool) -> Decomposition:
    if not is_aggregation(f):
        raise NotAggregation("only aggregation functions can be decomposed")
    lat = f.lattice
    tuples, rows = _block_matrix(f, dual)
    if not tuples:
        # no interior tuples: f is forced to be the first projection
        return Decomposition([], projection(lat, f.arity, 1))
    op = lat.meet if dual else lat.join
    acc = rows
    while len(acc) > 1:
        paired = op[acc[0 : len(acc) - 1 : 2], acc[1::2]]
        acc = np.concatenate([paired, acc[-1:]]) if len(acc) % 2 else paired
    parts = [(a, FnTable._trusted(lat, f.arity, r)) for a, r in zip(tuples, rows)]
    return Decomposition(parts, FnTable(lat, f.arity, acc[0]))


def decompose_join(f: FnTable) -> Decomposition:
    """Every h_a (ascending a) and their pointwise join, which equals f."""
    return _decompose(f, dual=False)


def decompose_meet(f: FnTable) -> Decomposition:
    return _decompose(f, dual=True)


# majority / near-unanimity --------------------------------------------------


def majority_meetjoin(lattice: Lattice) -> FnTable:
    """(x /\\ y) \\/ (y /\\ z) \\/ (x /\\ z)."""
    x, y, z = coords(lattice.size, 3)
    m, j = lattice.meet, lattice.join
    return FnTable(lattice, 3, j[j[m[x, y], m[y, z]], m[x, z]])


def majority_joinmeet(lattice: Lattice) -> FnTable:
    """(x \\/ y) /\\ (y \\/ z) /\\ (x \\/ z)."""
    x, y, z = coords(lattice.size, 3)
    m, j = lattice.meet, lattice.join
    return FnTable(lattice, 3, m[m[j[x, y], j[y, z]], j[x, z]])


def is_near_unanimity(f: FnTable) -> bool:
    if f.arity < 3:
        raise ArityTooSmall(f"near-unanimity needs arity >= 3, got {f.arity}")
    size = f.lattice.size
    x, y = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    x, y = x.ravel(), y.ravel()
    for pos in range(f.arity):
        code = np.zeros_like(x)
        for i in range(f.arity):
            code = code * size + (y if i == pos else x)
        if not np.array_equal(f.values[code], x):
            return False
    return True
