"""Independent brute-force oracles.

Nothing here calls the code paths under test beyond reading lattice tables
and FnTable values; each check is written straight from the definitions.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def tuples(size, n):
    return list(itertools.product(range(size), repeat=n))


def tuple_leq(lat, x, y):
    return all(lat.leq[a, b] for a, b in zip(x, y))


def is_monotone_naive(lat, n, values):
    """f(x) <= f(y) for every comparable pair x <= y (not just covers)."""
    ts = tuples(lat.size, n)
    f = dict(zip(ts, values))
    return all(lat.leq[f[x], f[y]] for x in ts for y in ts if tuple_leq(lat, x, y))


def is_aggregation_naive(lat, n, values):
    ts = tuples(lat.size, n)
    f = dict(zip(ts, values))
    return f[(0,) * n] == lat.bottom and f[(lat.size - 1,) * n] == lat.top and is_monotone_naive(lat, n, values)


@lru_cache(maxsize=None)
def _brute_force(lat, n):
    ts = tuples(lat.size, n)
    comparable = [(i, j) for i, x in enumerate(ts) for j, y in enumerate(ts) if i != j and tuple_leq(lat, x, y)]
    out = []
    for values in itertools.product(range(lat.size), repeat=len(ts)):
        if values[0] != lat.bottom or values[-1] != lat.top:
            continue
        if all(lat.leq[values[i], values[j]] for i, j in comparable):
            out.append(values)
    return tuple(out)


def brute_force_aggregation(lat, n):
    """Every aggregation table (as a tuple of values) by exhaustive filtering."""
    return list(_brute_force(lat, n))


def h_piecewise(lat, f, a):
    """The three-branch description of h_a, evaluated tuple by tuple."""
    n = f.arity
    bot, top = (lat.bottom,) * n, (lat.top,) * n
    fa = f(*a)
    out = []
    for x in tuples(lat.size, n):
        if x == top:
            out.append(lat.top)
        elif x != bot and tuple_leq(lat, a, x):
            out.append(fa)
        else:
            out.append(lat.bottom)
    return out


def g_piecewise(lat, f, a):
    n = f.arity
    bot, top = (lat.bottom,) * n, (lat.top,) * n
    fa = f(*a)
    out = []
    for x in tuples(lat.size, n):
        if x == bot:
            out.append(lat.bottom)
        elif x != top and tuple_leq(lat, x, a):
            out.append(fa)
        else:
            out.append(lat.top)
    return out


def preserves_naive(f, rel):
    """Scan every h x n matrix over L and test the definition directly."""
    lat = f.lattice
    h, n = rel.arity, f.arity
    for flat in itertools.product(range(lat.size), repeat=h * n):
        rows = [flat[i * n : (i + 1) * n] for i in range(h)]
        columns = [tuple(rows[i][j] for i in range(h)) for j in range(n)]
        if all(c in rel.tuples for c in columns):
            image = tuple(f(*r) for r in rows)
            if image not in rel.tuples:
                return False
    return True


def literal_closure(basis, k_max):
    """Fixpoint of composing any member f (arity k) with k members of one
    arity n, starting from projections and the basis.  Returns
    {arity: set of value-tuples}."""
    lat = basis[0].lattice
    m = lat.size
    members = {n: set() for n in range(1, k_max + 1)}
    for n in range(1, k_max + 1):
        grid = np.indices((m,) * n).reshape(n, -1)
        for i in range(n):
            members[n].add(tuple(grid[i].tolist()))
    for f in basis:
        members[f.arity].add(tuple(f.values.tolist()))
    changed = True
    while changed:
        changed = False
        snapshot = {n: np.array(sorted(s)) for n, s in members.items()}
        for k, outers in snapshot.items():
            for fv in outers:
                for n, stack in snapshot.items():
                    # every k-tuple of n-ary members at once, via broadcasting
                    code = np.zeros((1,) * k + (stack.shape[1],), dtype=np.int64)
                    for i in range(k):
                        shape = [1] * k + [stack.shape[1]]
                        shape[i] = len(stack)
                        code = code * m + stack.reshape(shape)
                    for row in np.unique(fv[code].reshape(-1, stack.shape[1]), axis=0):
                        new = tuple(row.tolist())
                        if new not in members[n]:
                            members[n].add(new)
                            changed = True
    return members


def isomorphic(l1, l2):
    if l1.size != l2.size:
        return False
    for perm in itertools.permutations(range(l1.size)):
        p = np.array(perm)
        if np.array_equal(l1.leq, l2.leq[np.ix_(p, p)]):
            return True
    return False
