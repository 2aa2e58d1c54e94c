"""Voxel geometry: outer approximations of attractors and exact cell topology.

A :class:`VoxelSet` is a finite set of integer cells; cell c occupies the
unit cube c + [0,1]^d at scale 2^-level.  Connectivity is always face
adjacency (2d neighbors), both for the solid and for its complement, which
keeps the component and cavity counts consistent with each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionError, ResourceError, ValidationError
from .isometry import IntVec, group_tables
from .system import RepTileSystem, bounding_radius

MAX_VOXEL_LEVEL = 8

Box = tuple[IntVec, IntVec]  # (lo, hi) opposite integer corners, lo < hi


@dataclass(frozen=True, slots=True)
class VoxelSet:
    dim: int
    level: int
    cells: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DimensionError(f"unsupported dimension {self.dim}")
        if self.level < 0:
            raise ValueError("level must be >= 0")

    @classmethod
    def from_cells(cls, dim: int, cells, level: int = 0) -> "VoxelSet":
        frozen = frozenset(tuple(int(x) for x in c) for c in cells)
        for c in frozen:
            if len(c) != dim:
                raise DimensionError(f"cell {c} does not have dimension {dim}")
        return cls(dim, level, frozen)

    def __len__(self) -> int:
        return len(self.cells)

    def bounding_box(self) -> Box | None:
        if not self.cells:
            return None
        arr = np.array(sorted(self.cells), dtype=np.int64)
        return tuple(int(v) for v in arr.min(axis=0)), tuple(
            int(v) + 1 for v in arr.max(axis=0)
        )

    def to_grid(self, pad: int = 0) -> tuple[np.ndarray, tuple[int, ...]]:
        """Dense boolean grid plus the lattice coordinate of grid index 0."""
        box = self.bounding_box()
        if box is None:
            shape = (2 * pad,) * self.dim if pad else (0,) * self.dim
            return np.zeros(shape, dtype=bool), (0,) * self.dim
        lo, hi = box
        origin = tuple(c - pad for c in lo)
        shape = tuple(h - l + 2 * pad for l, h in zip(lo, hi))
        grid = np.zeros(shape, dtype=bool)
        arr = np.array(sorted(self.cells), dtype=np.int64) - np.array(origin)
        grid[tuple(arr.T)] = True
        return grid, origin

    def translated(self, offset: IntVec) -> "VoxelSet":
        return VoxelSet(
            self.dim,
            self.level,
            frozenset(tuple(a + b for a, b in zip(c, offset)) for c in self.cells),
        )


@dataclass(frozen=True, slots=True)
class TopologyReport:
    components: int
    euler_characteristic: int
    cavities: int
    handles: int
    interior_components_estimate: int


def transform_cells(h, cells) -> frozenset[tuple[int, ...]]:
    """Image of a set of unit cells under an integer isometry.

    Signed permutations send unit cells to unit cells; on an axis that gets
    a -1 the image cube [y-1, y] has lower corner y - 1, hence the offset.
    """
    src = h.matrix.inverse().perm
    signs = tuple(h.matrix.signs[j] for j in src)
    offs = tuple(
        v - (1 if sg < 0 else 0) for v, sg in zip(h.translation, signs)
    )
    d = h.dim
    return frozenset(
        tuple(signs[r] * c[src[r]] + offs[r] for r in range(d)) for c in cells
    )


def voxelize(s: RepTileSystem, level: int) -> VoxelSet:
    """Outer approximation of the attractor at cell scale 2^level.

    The level-n supertile is covered by the boxes H_w([-R, R]^d) over all
    words of length n, and each box is an axis-aligned cube t_w + [-R, R]^d
    because signed permutations fix the sup-norm ball.  Refining never
    escapes the parent cells' children.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if level > MAX_VOXEL_LEVEL:
        raise ResourceError(
            f"voxel level {level} exceeds guard {MAX_VOXEL_LEVEL}"
        )
    tables = group_tables(s.dim)
    act = tables.act
    ct = tables.compose
    maps_c = [(tables.matrix_index(h.matrix), h.translation) for h in s.maps]
    radius = bounding_radius(s)
    dim = s.dim

    keys = {(0, (0,) * dim)}
    for _ in range(level):
        nxt = set()
        for mg, t in keys:
            t2 = tuple(2 * c for c in t)
            for mk, vk in maps_c:
                nxt.add((ct[mg][mk], tuple(a + b for a, b in zip(act(mg, vk), t2))))
        keys = nxt

    translations = np.array(sorted({t for _, t in keys}), dtype=np.int64)
    offsets = np.array(
        list(itertools.product(range(-radius, radius), repeat=dim)), dtype=np.int64
    )
    chunk = max(1, 2_000_000 // len(offsets))
    pieces = []
    for start in range(0, len(translations), chunk):
        block = translations[start : start + chunk]
        cells = (block[:, None, :] + offsets[None, :, :]).reshape(-1, dim)
        pieces.append(np.unique(cells, axis=0))
    merged = np.unique(np.concatenate(pieces), axis=0)
    return VoxelSet(dim, level, frozenset(map(tuple, merged.tolist())))


def voxel_from_boxes(boxes: list[Box]) -> VoxelSet:
    """Exact unit-cell decomposition of a union of integer boxes.

    Boxes must have pairwise disjoint interiors; an overlap is a data error,
    not something to be silently merged.
    """
    if not boxes:
        raise ValidationError("need at least one box", field="boxes")
    dim = len(boxes[0][0])
    cells = set()
    for n, (lo, hi) in enumerate(boxes):
        if len(lo) != dim or len(hi) != dim:
            raise DimensionError("boxes must share one dimension")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValidationError(f"box {n} has empty extent", field=f"boxes[{n}]")
        for cell in itertools.product(*(range(a, b) for a, b in zip(lo, hi))):
            if cell in cells:
                raise ValidationError(
                    f"box {n} overlaps an earlier box at cell {cell}",
                    field=f"boxes[{n}]",
                )
            cells.add(cell)
    return VoxelSet(dim, 0, frozenset(cells))


def _face_structure(dim: int) -> np.ndarray:
    return ndimage.generate_binary_structure(dim, 1)


def components(v: VoxelSet) -> int:
    """Number of face-connected components."""
    if not v.cells:
        return 0
    grid, _ = v.to_grid()
    _, n = ndimage.label(grid, structure=_face_structure(v.dim))
    return int(n)


def euler_characteristic(v: VoxelSet) -> int:
    """Euler characteristic of the closed cubical complex spanned by the cells.

    Every vertex, edge, face (and solid cube in 3D) incident to a cell is
    counted once; chi is the alternating sum.  Computed on the doubled
    (Khalimsky) grid where a k-cell sits at a point with exactly k odd
    coordinates, so the per-dimension counts are parity-class counts.
    """
    if not v.cells:
        return 0
    grid, _ = v.to_grid()
    dim = v.dim
    doubled = np.zeros(tuple(2 * n + 1 for n in grid.shape), dtype=bool)
    for delta in itertools.product((-1, 0, 1), repeat=dim):
        idx = tuple(
            slice(1 + d, 1 + d + 2 * n, 2) for d, n in zip(delta, grid.shape)
        )
        doubled[idx] |= grid
    chi = 0
    for parity in itertools.product((0, 1), repeat=dim):
        idx = tuple(slice(p, None, 2) for p in parity)
        chi += (-1) ** sum(parity) * int(doubled[idx].sum())
    return chi


def cavities(v: VoxelSet) -> int:
    """Bounded face-connected components of the complement (3D only)."""
    if v.dim != 3:
        raise DimensionError("cavities are defined for dimension 3")
    if not v.cells:
        return 0
    grid, _ = v.to_grid(pad=1)
    labels, n = ndimage.label(~grid, structure=_face_structure(3))
    outer = labels[0, 0, 0]  # padding guarantees the corner is complement
    return int(n - 1) if outer != 0 else int(n)


def hole_report(v: VoxelSet) -> TopologyReport:
    """Component/cavity/handle summary for a 3D voxel solid.

    handles = components + cavities - chi is the first Betti number for
    compact cubical solids.  The interior-component figure is a heuristic
    (cells whose full 3x3x3 neighborhood is covered); there is no exact
    method for the true interior here, so it is reported as an estimate.
    """
    if v.dim != 3:
        raise DimensionError("hole_report is defined for dimension 3")
    comps = components(v)
    chi = euler_characteristic(v)
    cavs = cavities(v)
    handles = comps + cavs - chi
    if v.cells:
        grid, _ = v.to_grid(pad=1)
        eroded = ndimage.binary_erosion(grid, structure=np.ones((3, 3, 3), dtype=bool))
        _, interior = ndimage.label(eroded, structure=_face_structure(3))
    else:
        interior = 0
    return TopologyReport(
        components=comps,
        euler_characteristic=chi,
        cavities=cavs,
        handles=handles,
        interior_components_estimate=int(interior),
    )
