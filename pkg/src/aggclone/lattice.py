"""Finite bounded lattices stored as order/meet/join tables.

Elements are plain integer indices into a :class:`Lattice`.  Every lattice
built here keeps its index order a linear extension of the partial order, so
the bottom is always index 0, the top is ``size - 1`` and ``leq`` is upper
triangular.  Downstream code (tuple encoding, enumeration) relies on that.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    CycleInCovers,
    FormatError,
    LatticeError,
    NotALattice,
    NotBounded,
    SizeGuardExceeded,
    UnknownElementName,
)

DEFAULT_MAX_ELEMENTS = 4096

NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")

Elem = int


@dataclass(frozen=True)
class LatticeSpec:
    name: str
    elements: list[str]
    covers: list[tuple[str, str]] = field(default_factory=list)


class Lattice:
    """An immutable finite bounded lattice.

    ``leq[x, y]`` is True iff x <= y; ``meet`` and ``join`` are n x n index
    tables.  Instances compare equal when names and tables coincide.
    """

    def __init__(self, name: str, names, leq, meet, join):
        self.name = name
        self.names = tuple(names)
        self.leq = _frozen(np.asarray(leq, dtype=bool))
        self.meet = _frozen(np.asarray(meet, dtype=np.int32))
        self.join = _frozen(np.asarray(join, dtype=np.int32))
        n = len(self.names)
        if n == 0:
            raise LatticeError("a lattice needs at least one element")
        if self.leq.shape != (n, n) or self.meet.shape != (n, n) or self.join.shape != (n, n):
            raise LatticeError("table shapes do not match the element count")
        if np.any(np.tril(self.leq, -1)):
            raise LatticeError("element indices must follow a linear extension of the order")
        self.bottom: Elem = 0
        self.top: Elem = n - 1
        if not (self.leq[0].all() and self.leq[:, n - 1].all()):
            raise NotBounded(f"{name}: no unique minimum or maximum")
        self._index = {s: i for i, s in enumerate(self.names)}
        if len(self._index) != n:
            raise LatticeError("element names must be unique")
        self._hash = hash((self.names, self.meet.tobytes()))

    @property
    def size(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"Lattice({self.name!r}, size={self.size})"

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Lattice):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.leq, other.leq)
            and np.array_equal(self.meet, other.meet)
            and np.array_equal(self.join, other.join)
        )

    def __hash__(self) -> int:
        return self._hash

    def index(self, name: str) -> Elem:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElementName(f"no element named {name!r} in lattice {self.name}") from None

    def elem_name(self, x: Elem) -> str:
        return self.names[x]

    def le(self, x: Elem, y: Elem) -> bool:
        return bool(self.leq[x, y])

    def up_set(self, x: Elem) -> np.ndarray:
        return np.flatnonzero(self.leq[x])

    def down_set(self, x: Elem) -> np.ndarray:
        return np.flatnonzero(self.leq[:, x])

    @cached_property
    def covers(self) -> list[tuple[Elem, Elem]]:
        """Cover pairs (x, y): x < y with nothing strictly between."""
        strict = self.leq & ~np.eye(self.size, dtype=bool)
        s = strict.astype(np.int64)
        between = (s @ s) > 0
        return [(int(x), int(y)) for x, y in zip(*np.nonzero(strict & ~between))]

    @cached_property
    def interior(self) -> list[Elem]:
        """Elements strictly between bottom and top."""
        return list(range(1, self.size - 1))

    def meet_all(self, xs) -> Elem:
        acc = self.top
        for x in xs:
            acc = int(self.meet[acc, x])
        return acc

    def join_all(self, xs) -> Elem:
        acc = self.bottom
        for x in xs:
            acc = int(self.join[acc, x])
        return acc


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


def _guard(n: int, max_elements: int) -> None:
    if n > max_elements:
        raise SizeGuardExceeded(f"{n} elements exceed the guard of {max_elements}")


def build_lattice(spec: LatticeSpec, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Lattice:
    """Close the cover relation, re-index topologically and derive meet/join.

    Raises CycleInCovers, NotBounded or NotALattice.
    """
    names = list(spec.elements)
    if len(set(names)) != len(names):
        raise LatticeError("duplicate element names")
    _guard(len(names), max_elements)
    pos = {s: i for i, s in enumerate(names)}
    succ: list[list[int]] = [[] for _ in names]
    indeg = [0] * len(names)
    for lo, hi in spec.covers:
        if lo not in pos or hi not in pos:
            raise LatticeError(f"cover ({lo}, {hi}) names an unlisted element")
        succ[pos[lo]].append(pos[hi])
        indeg[pos[hi]] += 1

    # Kahn's algorithm, ties broken by input position
    heap = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    if len(order) != len(names):
        raise CycleInCovers(f"{spec.name}: the cover relation has a cycle")

    n = len(names)
    new = {old: k for k, old in enumerate(order)}
    leq = np.eye(n, dtype=bool)
    for k in range(n - 1, -1, -1):
        for j in succ[order[k]]:
            leq[k] |= leq[new[j]]

    sorted_names = [names[i] for i in order]
    bottoms = [x for x in range(n) if leq[x].all()]
    tops = [x for x in range(n) if leq[:, x].all()]
    if len(bottoms) != 1 or len(tops) != 1:
        raise NotBounded(f"{spec.name}: no unique minimum or maximum")

    meet = np.zeros((n, n), dtype=np.int32)
    join = np.zeros((n, n), dtype=np.int32)
    for table, kind in ((meet, "infimum"), (join, "supremum")):
        for x in range(n):
            for y in range(x, n):
                if kind == "infimum":
                    bounds = np.flatnonzero(leq[:, x] & leq[:, y])
                    # index order is a linear extension: the glb, if any, is the largest bound
                    z = bounds[-1] if len(bounds) else -1
                    ok = z >= 0 and leq[bounds, z].all()
                else:
                    bounds = np.flatnonzero(leq[x] & leq[y])
                    z = bounds[0] if len(bounds) else -1
                    ok = z >= 0 and leq[z, bounds].all()
                if not ok:
                    raise NotALattice((sorted_names[x], sorted_names[y]), kind)
                table[x, y] = table[y, x] = z
    return Lattice(spec.name, sorted_names, leq, meet, join)


def chain(m: int) -> Lattice:
    if m < 1:
        raise ValueError("chain length must be at least 1")
    idx = np.arange(m)
    leq = idx[:, None] <= idx[None, :]
    return Lattice(f"chain{m}", [f"c{i}" for i in range(m)], leq, np.minimum.outer(idx, idx), np.maximum.outer(idx, idx))


def boolean(r: int, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Lattice:
    """Boolean lattice of r-bit vectors; bit i is coordinate i+1.

    Element names are bit strings written coordinate 1 first, e.g. ``110``
    for bits 0 and 1 set.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    if r > 62:
        raise SizeGuardExceeded(f"boolean({r}) is far beyond any guard")
    n = 1 << r
    _guard(n, max_elements)
    idx = np.arange(n)
    meet = np.bitwise_and.outer(idx, idx)
    join = np.bitwise_or.outer(idx, idx)
    leq = meet == idx[:, None]
    names = [bitstring(v, r) for v in range(n)] if r else ["e"]
    return Lattice(f"boolean{r}", names, leq, meet, join)


def bitstring(v: int, r: int) -> str:
    return "".join("1" if v >> i & 1 else "0" for i in range(r))


def product(l1: Lattice, l2: Lattice, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Lattice:
    n1, n2 = l1.size, l2.size
    _guard(n1 * n2, max_elements)
    i1, i2 = np.divmod(np.arange(n1 * n2), n2)
    leq = l1.leq[np.ix_(i1, i1)] & l2.leq[np.ix_(i2, i2)]
    meet = l1.meet[np.ix_(i1, i1)] * n2 + l2.meet[np.ix_(i2, i2)]
    join = l1.join[np.ix_(i1, i1)] * n2 + l2.join[np.ix_(i2, i2)]
    names = [f"{l1.names[a]}_{l2.names[b]}" for a, b in zip(i1, i2)]
    return Lattice(f"{l1.name}x{l2.name}", names, leq, meet, join)


def dual(lat: Lattice) -> Lattice:
    """Order-reversed lattice.

    Index i of the dual is index ``n-1-i`` of the original, which keeps the
    index order a linear extension and makes ``dual(dual(L)) == L``.
    """
    rev = np.arange(lat.size)[::-1]
    n = lat.size
    leq = lat.leq.T[np.ix_(rev, rev)]
    meet = (n - 1) - lat.join[np.ix_(rev, rev)]
    join = (n - 1) - lat.meet[np.ix_(rev, rev)]
    name = lat.name[5:] if lat.name.startswith("dual_") else f"dual_{lat.name}"
    return Lattice(name, [lat.names[i] for i in rev], leq, meet, join)


def reverse_index(lat: Lattice, x: Elem) -> Elem:
    """Map an element of ``lat`` to the same element of ``dual(lat)``."""
    return lat.size - 1 - x


def n5() -> Lattice:
    """The pentagon: 0 < a < b < 1 and 0 < c < 1."""
    return build_lattice(
        LatticeSpec("N5", ["0", "a", "b", "c", "1"], [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")])
    )


def m3() -> Lattice:
    """The diamond: three pairwise incomparable atoms."""
    return build_lattice(
        LatticeSpec("M3", ["0", "a", "b", "c", "1"], [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")])
    )


def fixture_lattices() -> list[Lattice]:
    """Small named lattices used throughout the test suites (sizes 2..5)."""
    return [chain(2), chain(3), chain(4), boolean(2), chain(5), n5(), m3()]


# .lat text format --------------------------------------------------------


def parse_lat(text: str, name: str = "L") -> LatticeSpec:
    elements = None
    covers = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if elements is None:
            head, sep, rest = line.partition(":")
            if not sep or head.strip() != "elements":
                raise FormatError(f"line {lineno}: expected 'elements: ...'")
            elements = rest.split()
            for e in elements:
                if not NAME_RE.match(e):
                    raise FormatError(f"line {lineno}: bad element name {e!r}")
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "cover":
            raise FormatError(f"line {lineno}: expected 'cover <lower> <upper>'")
        covers.append((parts[1], parts[2]))
    if elements is None:
        raise FormatError("missing 'elements:' line")
    unknown = {e for c in covers for e in c} - set(elements)
    if unknown:
        raise FormatError(f"covers name unlisted elements: {sorted(unknown)}")
    return LatticeSpec(name, elements, covers)


def read_lat(path, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Lattice:
    path = Path(path)
    spec = parse_lat(path.read_text(encoding="utf-8"), name=path.stem)
    return build_lattice(spec, max_elements=max_elements)


def format_lat(lat: Lattice) -> str:
    lines = [f"# lattice {lat.name}", "elements: " + " ".join(lat.names)]
    lines += [f"cover {lat.names[x]} {lat.names[y]}" for x, y in lat.covers]
    return "\n".join(lines) + "\n"
