"""Explicit n-ary function tables on a finite lattice.

A table of arity n on a lattice with m elements stores ``m**n`` values.  The
tuple (x1, ..., xn) lives at the mixed-radix code ``sum(xi * m**(n-i))``,
rightmost coordinate fastest.  Because element indices follow a linear
extension of the order, code order is a linear extension of ``L**n`` as well.
"""

from __future__ import annotations

import random
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    DuplicateTuple,
    FormatError,
    IncompleteTable,
    LatticeMismatch,
    SizeGuardExceeded,
)
from .lattice import Elem, Lattice

DEFAULT_MAX_CELLS = 10**6


def encode(tup: Sequence[Elem], size: int) -> int:
    code = 0
    for x in tup:
        if not 0 <= x < size:
            raise ValueError(f"element index {x} out of range for size {size}")
        code = code * size + int(x)
    return code


def decode(code: int, arity: int, size: int) -> tuple[Elem, ...]:
    if not 0 <= code < size**arity:
        raise ValueError(f"tuple index {code} out of range for {size}**{arity}")
    out = []
    for _ in range(arity):
        code, r = divmod(code, size)
        out.append(r)
    return tuple(reversed(out))


@lru_cache(maxsize=64)
def coords(size: int, arity: int) -> np.ndarray:
    """Array of shape (arity, size**arity): column c is ``decode(c)``."""
    grid = np.indices((size,) * arity, dtype=np.int32).reshape(arity, -1)
    grid.flags.writeable = False
    return grid


@lru_cache(maxsize=64)
def _weights(size: int, arity: int) -> np.ndarray:
    return size ** np.arange(arity - 1, -1, -1, dtype=np.int64)


def encode_many(columns: Sequence[np.ndarray], size: int) -> np.ndarray:
    """Vectorised encode: ``columns[i]`` holds coordinate i of every tuple."""
    code = np.zeros(np.shape(columns[0]), dtype=np.int64)
    for col in columns:
        code = code * size + col
    return code


class FnTable:
    """An immutable n-ary function on a lattice, stored as a flat value array."""

    __slots__ = ("lattice", "arity", "values", "_key")

    def __init__(self, lattice: Lattice, arity: int, values):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        vals = np.array(values, dtype=np.int32).reshape(-1)
        if vals.size != lattice.size**arity:
            raise ValueError(f"expected {lattice.size ** arity} values, got {vals.size}")
        if vals.size and (vals.min() < 0 or vals.max() >= lattice.size):
            raise ValueError("table entries must be valid element indices")
        vals.flags.writeable = False
        self.lattice = lattice
        self.arity = arity
        self.values = vals
        self._key = None

    @classmethod
    def _trusted(cls, lattice: Lattice, arity: int, values: np.ndarray) -> "FnTable":
        """Wrap an already-validated int32 row without re-checking it."""
        self = cls.__new__(cls)
        vals = np.ascontiguousarray(values, dtype=np.int32)
        vals.flags.writeable = False
        self.lattice, self.arity, self.values, self._key = lattice, arity, vals, None
        return self

    @classmethod
    def from_function(cls, lattice: Lattice, arity: int, fn: Callable[..., Elem]) -> "FnTable":
        grid = coords(lattice.size, arity)
        return cls(lattice, arity, [fn(*grid[:, c]) for c in range(grid.shape[1])])

    def key(self) -> bytes:
        if self._key is None:
            self._key = self.values.tobytes()
        return self._key

    def __call__(self, *xs: Elem) -> Elem:
        if len(xs) != self.arity:
            raise ArityMismatch(f"expected {self.arity} arguments, got {len(xs)}")
        return int(self.values[encode(xs, self.lattice.size)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FnTable):
            return NotImplemented
        return self.arity == other.arity and self.lattice == other.lattice and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.arity, self.key()))

    def __repr__(self) -> str:
        return f"FnTable({self.lattice.name}, arity={self.arity}, values={self.values.tolist()})"

    def grid(self) -> np.ndarray:
        """Values reshaped to an n-dimensional array indexed by elements."""
        return self.values.reshape((self.lattice.size,) * self.arity)

    def compose(self, inner: Sequence["FnTable"]) -> "FnTable":
        """``self(g_1, ..., g_k)``: every g_i has the same arity."""
        if len(inner) != self.arity:
            raise ArityMismatch(f"need {self.arity} inner functions, got {len(inner)}")
        n = inner[0].arity
        if any(g.arity != n for g in inner):
            raise ArityMismatch("inner functions must share one arity")
        for g in inner:
            _same_lattice(self, g)
        code = encode_many([g.values for g in inner], self.lattice.size)
        return FnTable(self.lattice, n, self.values[code])


def _same_lattice(f: FnTable, g: FnTable) -> None:
    if f.lattice is not g.lattice and f.lattice != g.lattice:
        raise LatticeMismatch(f"{f.lattice.name} vs {g.lattice.name}")


def projection(lattice: Lattice, arity: int, i: int) -> FnTable:
    """The i-th (1-based) projection of the given arity."""
    if not 1 <= i <= arity:
        raise ValueError(f"projection index {i} outside 1..{arity}")
    return FnTable(lattice, arity, coords(lattice.size, arity)[i - 1])


def constant(lattice: Lattice, arity: int, value: Elem) -> FnTable:
    return FnTable(lattice, arity, np.full(lattice.size**arity, value))


def pointwise_join(tables: Iterable[FnTable]) -> FnTable:
    tables = list(tables)
    lat = tables[0].lattice
    acc = np.full(tables[0].values.shape, lat.bottom, dtype=np.int32)
    for t in tables:
        acc = lat.join[acc, t.values]
    return FnTable(lat, tables[0].arity, acc)


def pointwise_meet(tables: Iterable[FnTable]) -> FnTable:
    tables = list(tables)
    lat = tables[0].lattice
    acc = np.full(tables[0].values.shape, lat.top, dtype=np.int32)
    for t in tables:
        acc = lat.meet[acc, t.values]
    return FnTable(lat, tables[0].arity, acc)


# predicates --------------------------------------------------------------


@lru_cache(maxsize=64)
def _cover_edges(lattice: Lattice, arity: int) -> tuple[np.ndarray, np.ndarray]:
    """Covering pairs of the product order as (lower codes, upper codes)."""
    m = lattice.size
    grid = coords(m, arity)
    weights = _weights(m, arity)
    lo, hi = [], []
    for i in range(arity):
        for u, v in lattice.covers:
            sel = np.flatnonzero(grid[i] == u)
            lo.append(sel)
            hi.append(sel + (v - u) * weights[i])
    if not lo:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(lo), np.concatenate(hi)


def _monotone_mask(lattice: Lattice, arity: int, values2d: np.ndarray) -> np.ndarray:
    lo, hi = _cover_edges(lattice, arity)
    return lattice.leq[values2d[:, lo], values2d[:, hi]].all(axis=1)


def is_monotone(f: FnTable) -> bool:
    """Check f(x) <= f(y) on every covering pair x < y of the product order."""
    return bool(_monotone_mask(f.lattice, f.arity, f.values[None, :])[0])


def satisfies_boundary(f: FnTable) -> bool:
    lat = f.lattice
    return int(f.values[0]) == lat.bottom and int(f.values[-1]) == lat.top


def is_aggregation(f: FnTable) -> bool:
    return satisfies_boundary(f) and is_monotone(f)


# enumeration and sampling ------------------------------------------------


def brute_force_cells(lattice: Lattice, arity: int) -> int:
    n_cells = lattice.size**arity
    return lattice.size**n_cells * n_cells


def enumerate_aggregation(
    lattice: Lattice,
    arity: int,
    method: str = "naive",
    max_cells: int = DEFAULT_MAX_CELLS,
    max_results: int | None = None,
) -> Iterator[FnTable]:
    """Yield every aggregation function of the given arity, lexicographically.

    ``method="naive"`` filters all ``m**(m**n)`` tables and refuses when their
    total cell count exceeds ``max_cells``.  ``method="dfs"`` walks the tuple
    codes in order, restricting each value to the up-set of the join of its
    lower covers' values; ``max_results`` caps how many it will produce.
    """
    if arity < 1:
        raise ValueError("arity must be at least 1")
    if method == "naive":
        yield from _enumerate_naive(lattice, arity, max_cells)
    elif method == "dfs":
        yield from _enumerate_dfs(lattice, arity, max_results)
    else:
        raise ValueError(f"unknown enumeration method {method!r}")


def _enumerate_naive(lattice: Lattice, arity: int, max_cells: int) -> Iterator[FnTable]:
    m = lattice.size
    n_cells = m**arity
    total = brute_force_cells(lattice, arity)
    if total > max_cells:
        raise SizeGuardExceeded(f"brute force needs {m}**{n_cells} tables ({total} cells > {max_cells})")
    # rows of coords(m, n_cells).T are all value arrays in lexicographic order
    chunk = max(1, 200_000 // n_cells)
    n_tables = m**n_cells
    for start in range(0, n_tables, chunk):
        codes = np.arange(start, min(start + chunk, n_tables), dtype=np.int64)
        rows = np.empty((codes.size, n_cells), dtype=np.int32)
        rest = codes
        for j in range(n_cells - 1, -1, -1):
            rest, rows[:, j] = np.divmod(rest, m)
        ok = (rows[:, 0] == lattice.bottom) & (rows[:, -1] == lattice.top)
        rows = rows[ok]
        rows = rows[_monotone_mask(lattice, arity, rows)]
        for r in rows:
            yield FnTable(lattice, arity, r)


def _lower_neighbours(lattice: Lattice, arity: int) -> list[list[int]]:
    lo, hi = _cover_edges(lattice, arity)
    preds: list[list[int]] = [[] for _ in range(lattice.size**arity)]
    for a, b in zip(lo.tolist(), hi.tolist()):
        preds[b].append(a)
    return preds


def _enumerate_dfs(lattice: Lattice, arity: int, max_results: int | None) -> Iterator[FnTable]:
    n_cells = lattice.size**arity
    preds = _lower_neighbours(lattice, arity)
    up = [lattice.up_set(x).tolist() for x in range(lattice.size)]
    join = lattice.join.tolist()
    values = [0] * n_cells
    values[0] = lattice.bottom
    produced = 0

    def options(pos: int) -> list[int]:
        floor = lattice.bottom
        for p in preds[pos]:
            floor = join[floor][values[p]]
        if pos == n_cells - 1:
            return [lattice.top]
        return up[floor]

    if n_cells == 1:
        # 1-element lattice: the single cell is both bottom and top tuple
        yield FnTable(lattice, arity, [lattice.bottom])
        return
    stack = [(1, options(1), 0)]
    while stack:
        pos, opts, k = stack.pop()
        if k >= len(opts):
            continue
        stack.append((pos, opts, k + 1))
        values[pos] = opts[k]
        if pos == n_cells - 1:
            produced += 1
            if max_results is not None and produced > max_results:
                raise SizeGuardExceeded(f"more than {max_results} aggregation functions")
            yield FnTable(lattice, arity, values)
        else:
            stack.append((pos + 1, options(pos + 1), 0))


def count_aggregation(lattice: Lattice, arity: int, method: str = "naive", **kw) -> int:
    return sum(1 for _ in enumerate_aggregation(lattice, arity, method=method, **kw))


def random_monotone_aggregation(lattice: Lattice, arity: int, seed: int) -> FnTable:
    """Sample an aggregation function by monotone-extension sampling.

    Tuples are visited in code order; each value is drawn uniformly from the
    up-set of the join of the values already given to its lower covers.  The
    bottom and top tuples are pinned.  Not uniform over aggregation functions.
    """
    if arity < 1:
        raise ValueError("arity must be at least 1")
    rng = random.Random(seed)
    n_cells = lattice.size**arity
    preds = _lower_neighbours(lattice, arity)
    up = [lattice.up_set(x).tolist() for x in range(lattice.size)]
    join = lattice.join.tolist()
    values = [lattice.bottom] * n_cells
    for pos in range(1, n_cells):
        floor = lattice.bottom
        for p in preds[pos]:
            floor = join[floor][values[p]]
        values[pos] = rng.choice(up[floor])
    values[-1] = lattice.top
    return FnTable(lattice, arity, values)


# .fn text format ----------------------------------------------------------


def parse_fn(text: str, lattice: Lattice) -> FnTable:
    header: dict[str, str] = {}
    rows: dict[int, int] = {}
    arity = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if arity is None:
            key, sep, val = line.partition(":")
            if not sep or key.strip() not in ("lattice", "arity"):
                raise FormatError(f"line {lineno}: expected header 'lattice:' or 'arity:'")
            header[key.strip()] = val.strip()
            if key.strip() == "arity":
                try:
                    arity = int(header["arity"])
                except ValueError:
                    raise FormatError(f"line {lineno}: arity must be an integer") from None
                if arity < 1:
                    raise FormatError(f"line {lineno}: arity must be at least 1")
            continue
        lhs, sep, rhs = line.partition("->")
        if not sep:
            raise FormatError(f"line {lineno}: expected '<x1> ... <xn> -> <value>'")
        args = lhs.split()
        if len(args) != arity or len(rhs.split()) != 1:
            raise FormatError(f"line {lineno}: expected {arity} arguments and one value")
        code = encode([lattice.index(a) for a in args], lattice.size)
        if code in rows:
            raise DuplicateTuple(f"line {lineno}: tuple {' '.join(args)} listed twice")
        rows[code] = lattice.index(rhs.strip())
    if arity is None:
        raise FormatError("missing 'arity:' header")
    n_cells = lattice.size**arity
    if len(rows) != n_cells:
        missing = next(c for c in range(n_cells) if c not in rows)
        tup = " ".join(lattice.names[x] for x in decode(missing, arity, lattice.size))
        raise IncompleteTable(f"{n_cells - len(rows)} tuple(s) missing, e.g. ({tup})")
    return FnTable(lattice, arity, [rows[c] for c in range(n_cells)])


def read_fn(path, lattice: Lattice) -> FnTable:
    return parse_fn(Path(path).read_text(encoding="utf-8"), lattice)


def format_fn(f: FnTable) -> str:
    lat = f.lattice
    lines = [f"lattice: {lat.name}", f"arity: {f.arity}"]
    grid = coords(lat.size, f.arity)
    for c, v in enumerate(f.values.tolist()):
        args = " ".join(lat.names[x] for x in grid[:, c])
        lines.append(f"{args} -> {lat.names[v]}")
    return "\n".join(lines) + "\n"
