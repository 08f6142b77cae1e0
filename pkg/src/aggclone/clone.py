"""Relation preservation and bounded-arity composition closure."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import join_fn, meet_fn, oplus
from .errors import FormatError, LatticeMismatch, LatticeTooSmall, SizeGuardExceeded
from .fntable import (
    DEFAULT_MAX_CELLS,
    FnTable,
    coords,
    encode,
    encode_many,
    enumerate_aggregation,
    is_aggregation,
)
from .lattice import Elem, Lattice

DEFAULT_MAX_TABLES = 10**5


@dataclass(frozen=True)
class Relation:
    lattice: Lattice
    arity: int
    tuples: frozenset

    @classmethod
    def of(cls, lattice: Lattice, tuples: Iterable[Sequence[Elem]]) -> Relation:
        tuples = frozenset(tuple(int(x) for x in t) for t in tuples)
        arities = {len(t) for t in tuples}
        if len(arities) != 1:
            raise ValueError("a relation needs a non-empty set of equal-length tuples")
        (d,) = arities
        for t in tuples:
            if any(not 0 <= x < lattice.size for x in t):
                raise ValueError(f"tuple {t} has an entry outside the lattice")
        return cls(lattice, d, tuples)

    def sorted_tuples(self) -> list[tuple[Elem, ...]]:
        return sorted(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples


def find_violation(f: FnTable, rho: Relation):
    """Return (columns, image) for a matrix breaking preservation, else None.

    Columns range over all ``|rho|**n`` choices; the image is f applied to
    each row of the resulting h x n matrix.
    """
    if f.lattice != rho.lattice:
        raise LatticeMismatch(f"{f.lattice.name} vs {rho.lattice.name}")
    size = f.lattice.size
    cols = np.array(rho.sorted_tuples(), dtype=np.int64)  # (r, d)
    choice = coords(len(cols), f.arity)  # (n, r**n)
    image = np.stack(
        [f.values[encode_many([cols[choice[i], j] for i in range(f.arity)], size)] for j in range(rho.arity)],
        axis=1,
    )
    allowed = np.array([encode(t, size) for t in rho.tuples], dtype=np.int64)
    ok = np.isin(encode_many(list(image.T), size), allowed)
    if ok.all():
        return None
    k = int(np.flatnonzero(~ok)[0])
    columns = [tuple(int(v) for v in cols[choice[i, k]]) for i in range(f.arity)]
    return columns, tuple(int(v) for v in image[k])


def preserves(f: FnTable, rho: Relation) -> bool:
    return find_violation(f, rho) is None


# closure ------------------------------------------------------------------


@dataclass
class FnSet:
    """Deduplicated tables per arity 1..k_max.

    ``complete`` is False when a closure stopped early because every
    requested target had been found.
    """

    lattice: Lattice
    k_max: int
    members: dict[int, dict[bytes, FnTable]] = field(default_factory=dict)
    complete: bool = True

    def __post_init__(self):
        for n in range(1, self.k_max + 1):
            self.members.setdefault(n, {})

    def add(self, f: FnTable) -> bool:
        if f.arity > self.k_max:
            raise ValueError(f"arity {f.arity} exceeds k_max={self.k_max}")
        bucket = self.members[f.arity]
        if f.key() in bucket:
            return False
        bucket[f.key()] = f
        return True

    def tables(self, arity: int) -> list[FnTable]:
        return list(self.members.get(arity, {}).values())

    def all_tables(self) -> list[FnTable]:
        return [f for n in sorted(self.members) for f in self.members[n].values()]

    def counts(self) -> dict[int, int]:
        return {n: len(b) for n, b in sorted(self.members.items())}

    def __contains__(self, f: FnTable) -> bool:
        return contains(self, f)

    def __len__(self) -> int:
        return sum(self.counts().values())


def contains(s: FnSet, f: FnTable) -> bool:
    if f.arity > s.k_max:
        raise ValueError(f"arity {f.arity} exceeds k_max={s.k_max}")
    return f.lattice == s.lattice and f.key() in s.members[f.arity]


def _apply(op: FnTable, sources: Sequence[np.ndarray], size: int, chunk_rows: int) -> Iterable[np.ndarray]:
    """Yield op(g_1, ..., g_k) for every g_i drawn from ``sources[i]``."""
    k = len(sources)
    if k == 1:
        yield op.values[sources[0]]
        return
    *outer, a, b = sources
    block = max(1, chunk_rows // max(1, len(b)))
    for prefix in itertools.product(*(range(len(s)) for s in outer)):
        base = np.zeros(a.shape[1], dtype=np.int64)
        for s, i in zip(outer, prefix):
            base = base * size + s[i]
        for start in range(0, len(a), block):
            ca = a[start : start + block].astype(np.int64)
            code = (base * size + ca)[:, None, :] * size + b[None, :, :]
            yield op.values[code].reshape(-1, a.shape[1])


def _generate(
    lattice: Lattice,
    arity: int,
    ops: Sequence[FnTable],
    max_tables: int,
    targets: set[bytes],
    dtype,
) -> tuple[list[np.ndarray], bool]:
    """Arity-``arity`` tables generated from the projections by ``ops``.

    Semi-naive: every round only forms combinations that use at least one
    table produced in the previous round.
    """
    size = lattice.size
    seen: dict[bytes, int] = {}
    rows: list[np.ndarray] = []

    def admit(block: np.ndarray) -> None:
        block = np.unique(block.astype(dtype), axis=0)
        for r in block:
            key = r.tobytes()
            if key not in seen:
                seen[key] = len(rows)
                rows.append(r)
                if len(rows) > max_tables:
                    raise SizeGuardExceeded(f"closure exceeds {max_tables} tables at arity {arity}")

    admit(coords(size, arity))
    old_end, new_end = 0, len(rows)
    while old_end < new_end:
        if targets and targets <= seen.keys():
            return rows, False
        everything = np.array(rows[:new_end])
        old, fresh = everything[:old_end], everything[old_end:new_end]
        for op in ops:
            k = op.arity
            for p in range(k):
                sources = [old] * p + [fresh] + [everything] * (k - p - 1)
                if any(len(s) == 0 for s in sources):
                    continue
                for block in _apply(op, sources, size, chunk_rows=1 << 16):
                    admit(block)
        old_end, new_end = new_end, len(rows)
    return rows, True


def closure(
    basis: Iterable[FnTable],
    k_max: int = 2,
    max_cells: int = DEFAULT_MAX_CELLS,
    max_tables: int = DEFAULT_MAX_TABLES,
    targets: Iterable[FnTable] = (),
) -> FnSet:
    """Least set of tables of arity <= k_max that contains the projections and
    the basis and is closed under composition.

    At each arity n the members are exactly the n-ary term functions of the
    basis, so they are produced by applying basis tables to already generated
    n-ary tables until nothing new appears.  With ``targets`` the search stops
    as soon as all of them are present (the result is then marked
    incomplete).
    """
    basis = list(basis)
    if not basis:
        raise ValueError("closure needs a non-empty basis")
    lattice = basis[0].lattice
    for f in basis:
        if f.lattice != lattice:
            raise LatticeMismatch("basis tables live on different lattices")
        if f.arity > k_max:
            raise ValueError(f"basis member of arity {f.arity} exceeds k_max={k_max}")
    if lattice.size**k_max > max_cells:
        raise SizeGuardExceeded(f"{lattice.size}**{k_max} cells per table exceed {max_cells}")
    targets = list(targets)
    dtype = np.uint8 if lattice.size <= 256 else np.int32
    out = FnSet(lattice, k_max)
    uniq: dict[tuple[int, bytes], FnTable] = {}
    for f in basis:
        uniq.setdefault((f.arity, f.key()), f)
    ops = list(uniq.values())
    for n in range(1, k_max + 1):
        wanted = {t.values.astype(dtype).tobytes() for t in targets if t.arity == n}
        rows, finished = _generate(lattice, n, ops, max_tables, wanted, dtype)
        out.complete &= finished
        for r in rows:
            out.add(FnTable(lattice, n, r))
    if all(is_aggregation(f) for f in basis):
        for n in out.members:
            for f in out.members[n].values():
                if int(f.values[0]) != lattice.bottom or int(f.values[-1]) != lattice.top:
                    raise RuntimeError("composition produced a boundary-violating table")
    return out


# unary-insufficiency witness -------------------------------------------------


@dataclass
class UnaryWitness:
    relation: Relation
    a: Elem
    violator: FnTable
    columns: list[tuple[Elem, ...]]
    image: tuple[Elem, ...]
    unary_count: int
    unary_preserve: bool
    lattice_ops_preserve: bool
    violator_preserves: bool

    @property
    def holds(self) -> bool:
        return self.unary_preserve and self.lattice_ops_preserve and not self.violator_preserves


def unary_insufficiency_witness(lattice: Lattice) -> UnaryWitness:
    """Relation {(top, bottom), (bottom, bottom)} kept by every unary
    aggregation function and by meet/join, but broken by oplus_a for the
    lowest-indexed element a strictly between the bounds."""
    if lattice.size < 3:
        raise LatticeTooSmall(f"need at least three elements, {lattice.name} has {lattice.size}")
    top, bot = lattice.top, lattice.bottom
    rel = Relation.of(lattice, [(top, bot), (bot, bot)])
    unary = list(enumerate_aggregation(lattice, 1, method="dfs"))
    a = lattice.interior[0]
    violator = oplus(lattice, a)
    hit = find_violation(violator, rel)
    columns, image = hit if hit is not None else ([], ())
    return UnaryWitness(
        relation=rel,
        a=a,
        violator=violator,
        columns=columns,
        image=image,
        unary_count=len(unary),
        unary_preserve=all(preserves(u, rel) for u in unary),
        lattice_ops_preserve=preserves(meet_fn(lattice), rel) and preserves(join_fn(lattice), rel),
        violator_preserves=hit is None,
    )


def unary_lattice_basis(lattice: Lattice) -> list[FnTable]:
    """meet, join and every unary aggregation function."""
    return [meet_fn(lattice), join_fn(lattice)] + list(enumerate_aggregation(lattice, 1, method="dfs"))


# .rel text format --------------------------------------------------------


def parse_rel(text: str, lattice: Lattice) -> Relation:
    arity = None
    tuples = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if arity is None:
            key, sep, val = line.partition(":")
            if not sep or key.strip() not in ("lattice", "arity"):
                raise FormatError(f"line {lineno}: expected header 'lattice:' or 'arity:'")
            if key.strip() == "arity":
                try:
                    arity = int(val)
                except ValueError:
                    raise FormatError(f"line {lineno}: arity must be an integer") from None
            continue
        parts = line.split()
        if len(parts) != arity:
            raise FormatError(f"line {lineno}: expected {arity} elements")
        tuples.append([lattice.index(p) for p in parts])
    if arity is None or not tuples:
        raise FormatError("relation file needs an arity header and at least one tuple")
    return Relation.of(lattice, tuples)


def read_rel(path, lattice: Lattice) -> Relation:
    return parse_rel(Path(path).read_text(encoding="utf-8"), lattice)


def format_rel(rel: Relation) -> str:
    names = rel.lattice.names
    lines = [f"lattice: {rel.lattice.name}", f"arity: {rel.arity}"]
    lines += [" ".join(names[x] for x in t) for t in rel.sorted_tuples()]
    return "\n".join(lines) + "\n"
