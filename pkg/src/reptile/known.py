"""Reference systems: textbook tiles plus tiles derived by this package's search.

The derived data (flag, hole tile) are checked into code so tests and docs
do not depend on search runs; scripts/derive_flag.py re-derives the flag and
:mod:`reptile.holetile` re-derives the hole tile from scratch.
"""

from __future__ import annotations

import itertools

from .isometry import LatticeIsometry, SignedPermMatrix
from .system import BlockSystem, RepTileSystem


def square_system() -> RepTileSystem:
    """The 2x2 subdivision of the square: four translated half-size copies."""
    return RepTileSystem(
        tuple(
            LatticeIsometry.from_translation(v)
            for v in itertools.product((0, 1), repeat=2)
        )
    )


def cube_system() -> RepTileSystem:
    """The 2x2x2 subdivision of the cube."""
    return RepTileSystem(
        tuple(
            LatticeIsometry.from_translation(v)
            for v in itertools.product((0, 1), repeat=3)
        )
    )


def cube_block() -> BlockSystem:
    """The cube written as a block system: halve along x, then y, then z."""
    t = LatticeIsometry.from_translation
    return BlockSystem(
        f1=t((1, 0, 0)),
        f2=t((0, 1, 0)),
        f3=LatticeIsometry.identity(3),
        f4=t((0, 0, 1)),
    )


def duplicate_map_system() -> RepTileSystem:
    """A degenerate system (two equal maps); never a rep-tile."""
    maps = list(square_system().maps)
    maps[1] = maps[0]
    return RepTileSystem(tuple(maps))


def flag_system() -> RepTileSystem:
    """The 'flag' 4-rep-tile, derived by search (see docs/flag-derivation.md).

    A connected polygonal tile whose tilings have exactly 60 neighbor maps;
    the subdivision mixes rotations and reflections, which is what makes the
    induced tilings non-periodic.
    """
    raise NotImplementedError("flag data pending derivation")
