"""Constraint search for the simplified hole tile and its induced system.

The target: a solid T made of four 4x2x1 plates with pairwise disjoint
interiors such that T together with a copy rotated by 180 degrees fills an
8x4x2 box exactly.  Doubling each plate of T gives an 8x4x2 box, which is
again a T-copy plus a rotated T-copy, so 2T decomposes into eight isometric
copies of T: any such T is automatically an 8-rep-tile.

The plate placement is not written down anywhere as coordinates, only as
the constraints above plus "connected with a single hole", so it is derived
here by exhaustive search over all plate positions inside the box.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .isometry import IntVec, LatticeIsometry, SignedPermMatrix, compose
from .system import RepTileSystem
from .topology import Box, VoxelSet, hole_report

BOX_DIMS = (8, 4, 2)
PLATE_DIMS = (4, 2, 1)
PLATE_COUNT = 4
_NCELLS = BOX_DIMS[0] * BOX_DIMS[1] * BOX_DIMS[2]
_FULL = (1 << _NCELLS) - 1


def _cell_bit(x: int, y: int, z: int) -> int:
    return ((x * BOX_DIMS[1]) + y) * BOX_DIMS[2] + z


def _box_mask(lo: IntVec, hi: IntVec) -> int:
    mask = 0
    for x in range(lo[0], hi[0]):
        for y in range(lo[1], hi[1]):
            for z in range(lo[2], hi[2]):
                mask |= 1 << _cell_bit(x, y, z)
    return mask


def _plate_placements() -> list[tuple[int, Box]]:
    """Every axis-aligned position of a 4x2x1 box inside the 8x4x2 box."""
    out = []
    for dims in sorted(set(itertools.permutations(PLATE_DIMS))):
        for lo in itertools.product(
            *(range(BOX_DIMS[a] - dims[a] + 1) for a in range(3))
        ):
            hi = tuple(lo[a] + dims[a] for a in range(3))
            out.append((_box_mask(lo, hi), (lo, hi)))
    return out


def _half_turns() -> list[tuple[LatticeIsometry, list[int]]]:
    """The three 180-degree rotations preserving the 8x4x2 box.

    All box dimensions differ, so no axis swap preserves it; only the three
    central rotations about the coordinate axes remain.  Each is returned
    with its action on cell bits.
    """
    turns = []
    for fixed_axis in (2, 1, 0):
        signs = tuple(1 if a == fixed_axis else -1 for a in range(3))
        translation = tuple(0 if a == fixed_axis else BOX_DIMS[a] for a in range(3))
        iso = LatticeIsometry(SignedPermMatrix((0, 1, 2), signs), translation)
        perm = [0] * _NCELLS
        for x in range(BOX_DIMS[0]):
            for y in range(BOX_DIMS[1]):
                for z in range(BOX_DIMS[2]):
                    cx = BOX_DIMS[0] - 1 - x if fixed_axis != 0 else x
                    cy = BOX_DIMS[1] - 1 - y if fixed_axis != 1 else y
                    cz = BOX_DIMS[2] - 1 - z if fixed_axis != 2 else z
                    perm[_cell_bit(x, y, z)] = _cell_bit(cx, cy, cz)
        turns.append((iso, perm))
    return turns


def _apply_cell_perm(mask: int, perm: list[int]) -> int:
    out = 0
    for bit in range(_NCELLS):
        if mask >> bit & 1:
            out |= 1 << perm[bit]
    return out


def _mask_cells(mask: int) -> frozenset[tuple[int, int, int]]:
    cells = []
    for x in range(BOX_DIMS[0]):
        for y in range(BOX_DIMS[1]):
            for z in range(BOX_DIMS[2]):
                if mask >> _cell_bit(x, y, z) & 1:
                    cells.append((x, y, z))
    return frozenset(cells)


@dataclass(frozen=True, slots=True)
class HoleTileSolution:
    plates: tuple[Box, ...]
    rotation: LatticeIsometry
    cells: frozenset[tuple[int, int, int]]

    def voxels(self) -> VoxelSet:
        return VoxelSet(3, 0, self.cells)


@lru_cache(maxsize=1)
def find_hole_tiles() -> tuple[HoleTileSolution, ...]:
    """All plate placements satisfying the fill constraint, one hole each.

    Returns solutions whose union is connected with exactly one handle,
    deduplicated by cell set, in deterministic search order.  Runs in a few
    seconds: 72 plate positions, four chosen disjointly, three rotations.
    """
    placements = _plate_placements()
    turns = _half_turns()
    raw: list[tuple[tuple[Box, ...], LatticeIsometry, int]] = []

    def extend(start: int, chosen: list[int], union: int) -> None:
        if len(chosen) == PLATE_COUNT:
            for iso, perm in turns:
                if _apply_cell_perm(union, perm) == _FULL ^ union:
                    raw.append(
                        (
                            tuple(placements[k][1] for k in chosen),
                            iso,
                            union,
                        )
                    )
            return
        for k in range(start, len(placements)):
            mask = placements[k][0]
            if mask & union:
                continue
            chosen.append(k)
            extend(k + 1, chosen, union | mask)
            chosen.pop()

    extend(0, [], 0)

    seen_cells: set[int] = set()
    solutions = []
    for plates, iso, union in raw:
        if union in seen_cells:
            continue
        seen_cells.add(union)
        cells = _mask_cells(union)
        report = hole_report(VoxelSet(3, 0, cells))
        if report.components == 1 and report.handles == 1:
            solutions.append(HoleTileSolution(plates, iso, cells))
    return tuple(solutions)


def induced_system(solution: HoleTileSolution) -> RepTileSystem:
    """The 8-map system whose attractor is the solution tile.

    Doubling plate i gives an 8x4x2 box; phi_i is the (orientation-
    preserving, canonically chosen) isometry carrying the reference box onto
    it, and the two pieces it contributes are phi_i and phi_i o rotation.
    """
    maps = []
    for lo, hi in solution.plates:
        dims = tuple(2 * (h - l) for l, h in zip(lo, hi))
        target_lo = tuple(2 * l for l in lo)
        # Unique axis matching: all of 8, 4, 2 are distinct.
        perm = tuple(dims.index(BOX_DIMS[j]) for j in range(3))
        matrix = None
        for signs in itertools.product((1, -1), repeat=3):
            cand = SignedPermMatrix(perm, signs)
            if cand.det() == 1:
                matrix = cand
                break
        translation = [0, 0, 0]
        for j in range(3):
            r = perm[j]
            translation[r] = target_lo[r] + (BOX_DIMS[j] if matrix.signs[j] == -1 else 0)
        phi = LatticeIsometry(matrix, tuple(translation))
        maps.append(phi)
        maps.append(compose(phi, solution.rotation))
    return RepTileSystem(tuple(maps))


@lru_cache(maxsize=1)
def hole_tile_solution() -> HoleTileSolution:
    """Canonical (first found) hole tile."""
    solutions = find_hole_tiles()
    if not solutions:
        raise RuntimeError("no hole tile satisfies the constraints")
    return solutions[0]


def hole_tile_system() -> RepTileSystem:
    return induced_system(hole_tile_solution())
