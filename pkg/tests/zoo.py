"""Lattices shared by the test modules."""

from aggclone.lattice import LatticeSpec, boolean, build_lattice, chain, m3, n5


def small_lattices():
    """Fixture lattices with 3..5 elements."""
    return [chain(3), chain(4), boolean(2), chain(5), n5(), m3()]


def bulk_lattices():
    """The 4- and 5-element fixtures used for sampled round trips."""
    return [chain(4), boolean(2), chain(5), n5(), m3()]


def all_lattices_up_to_five():
    """Every lattice with at most five elements, one per isomorphism class."""
    square_low = build_lattice(
        LatticeSpec("square_low", ["0", "z", "a", "b", "1"], [("0", "z"), ("z", "a"), ("z", "b"), ("a", "1"), ("b", "1")])
    )
    square_high = build_lattice(
        LatticeSpec("square_high", ["0", "a", "b", "u", "1"], [("0", "a"), ("0", "b"), ("a", "u"), ("b", "u"), ("u", "1")])
    )
    return [chain(1), chain(2), chain(3), chain(4), boolean(2), chain(5), n5(), m3(), square_low, square_high]
