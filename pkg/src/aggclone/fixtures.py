"""The worked binary example on the three-element chain 0 < a < 1.

Only the oplus subscripts of its seven building blocks are known, so the
table is rebuilt from them: f(0,a) = f(a,0) = f(a,a) = 0, f(0,1) = f(1,0) = a,
f(a,1) = f(1,a) = 1, plus the forced boundary values.
"""

from __future__ import annotations

from .fntable import FnTable
from .lattice import Lattice, LatticeSpec, build_lattice

# (tuple a, oplus subscript f(a)) for every interior tuple, element names
WORKED_SUBSCRIPTS = {
    ("0", "a"): "0",
    ("a", "0"): "0",
    ("a", "a"): "0",
    ("0", "1"): "a",
    ("1", "0"): "a",
    ("a", "1"): "1",
    ("1", "a"): "1",
}

# the seven-joinand expression in its original order, in term syntax
WORKED_EXPRESSION = (
    "(chi[a](x2) /\\ (x1 (+)[0] x2)) \\/ (chi[a](x1) /\\ (x1 (+)[0] x2)) \\/ (chi[1](x2) /\\ (x1 (+)[a] x2))"
    " \\/ ((chi[a](x1) /\\ chi[a](x2)) /\\ (x1 (+)[0] x2)) \\/ (chi[1](x1) /\\ (x1 (+)[a] x2))"
    " \\/ ((chi[a](x1) /\\ chi[1](x2)) /\\ (x1 (+)[1] x2)) \\/ ((chi[1](x1) /\\ chi[a](x2)) /\\ (x1 (+)[1] x2))"
)


def worked_lattice() -> Lattice:
    return build_lattice(LatticeSpec("chain3", ["0", "a", "1"], [("0", "a"), ("a", "1")]))


def worked_function(lattice: Lattice | None = None) -> FnTable:
    lat = lattice if lattice is not None else worked_lattice()
    i = lat.index
    values = {("0", "0"): "0", ("1", "1"): "1", **WORKED_SUBSCRIPTS}
    return FnTable.from_function(lat, 2, lambda x, y: i(values[(lat.names[x], lat.names[y])]))
