"""Shareable geometry: supertile placements, quad meshes, and vector drawings.

Both file formats are plain text and byte-deterministic for a given input,
so exports can be diffed and used as golden files.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, ResourceError
from .isometry import LatticeIsometry
from .system import RepTileSystem, g_conjugate, word_map
from .topology import VoxelSet, transform_cells

MAX_PATCH_LEVEL = 6

# Fixed 16-color cycle keyed on placement index; deterministic figures.
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
    "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#2f4b7c", "#ffa600",
    "#665191", "#a05195", "#d45087", "#f95d6a",
)


@dataclass(frozen=True, slots=True)
class TilingPatch:
    """The m^level copies making up a level-n supertile, in word order."""

    level: int
    placements: tuple[LatticeIsometry, ...]


def supertile_patch(s: RepTileSystem, level: int) -> TilingPatch:
    """All word maps of the given length, ordered lexicographically by word.

    Callers should verify the rep-tile property first; for a verified tile
    the placements are pairwise distinct and tile the supertile exactly.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if level > MAX_PATCH_LEVEL:
        raise ResourceError(f"patch level {level} exceeds guard {MAX_PATCH_LEVEL}")
    placements = [LatticeIsometry.identity(s.dim)]
    for _ in range(level):
        placements = [
            g_conjugate(h).compose(hk) for h in placements for hk in s.maps
        ]
    return TilingPatch(level, tuple(placements))


# Exposed-face table: (neighbor offset, four corner offsets in outward CCW order).
_FACES_3D = (
    ((-1, 0, 0), ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0))),
    ((1, 0, 0), ((1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1))),
    ((0, -1, 0), ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1))),
    ((0, 1, 0), ((0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0))),
    ((0, 0, -1), ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0))),
    ((0, 0, 1), ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1))),
)


def mesh_export(v: VoxelSet) -> bytes:
    """Boundary quad mesh of a 3D voxel set in OBJ-style text.

    One quad per exposed face (face exposed iff the adjacent cell is
    absent), vertices deduplicated, 1-based face indices, outward winding.
    """
    if v.dim != 3:
        raise DimensionError("mesh export is defined for dimension 3")
    cells = v.cells
    vertex_index: dict[tuple[int, int, int], int] = {}
    vertices: list[tuple[int, int, int]] = []
    faces: list[tuple[int, int, int, int]] = []
    for cell in sorted(cells):
        for offset, corners in _FACES_3D:
            neighbor = tuple(a + b for a, b in zip(cell, offset))
            if neighbor in cells:
                continue
            quad = []
            for corner in corners:
                p = tuple(a + b for a, b in zip(cell, corner))
                idx = vertex_index.get(p)
                if idx is None:
                    idx = len(vertices) + 1
                    vertex_index[p] = idx
                    vertices.append(p)
                quad.append(idx)
            faces.append(tuple(quad))
    lines = [f"v {p[0]} {p[1]} {p[2]}" for p in vertices]
    lines += [f"f {q[0]} {q[1]} {q[2]} {q[3]}" for q in faces]
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def _square_path(cells) -> str:
    return " ".join(f"M{x},{y} h1 v1 h-1 z" for x, y in sorted(cells))


def svg_export(v: VoxelSet, patch: TilingPatch | None = None) -> bytes:
    """2D drawing: per-cell squares, one filled path per tile copy.

    With a patch, each placement draws one transformed copy of the voxel
    set, colored from the fixed palette by placement index.  The y axis is
    flipped so the drawing matches lattice orientation.
    """
    if v.dim != 2:
        raise DimensionError("svg export is defined for dimension 2")
    copies: list[frozenset] = []
    if patch is None:
        copies.append(v.cells)
    else:
        for h in patch.placements:
            placed = LatticeIsometry(
                h.matrix, tuple(c * 2**v.level for c in h.translation)
            )
            copies.append(transform_cells(placed, v.cells))

    everything = [c for copy in copies for c in copy]
    if everything:
        xs = [c[0] for c in everything]
        ys = [c[1] for c in everything]
        min_x, max_x = min(xs), max(xs) + 1
        min_y, max_y = min(ys), max(ys) + 1
    else:
        min_x = min_y = 0
        max_x = max_y = 1
    width = max_x - min_x
    height = max_y - min_y

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{min_x} {-max_y} {width} {height}">',
        '<g transform="scale(1,-1)">',
    ]
    for k, copy in enumerate(copies):
        if not copy:
            continue
        color = PALETTE[k % len(PALETTE)]
        parts.append(
            f'<path d="{_square_path(copy)}" fill="{color}" stroke="#222222" stroke-width="0.03"/>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def patch_export(s: RepTileSystem, patch: TilingPatch) -> bytes:
    """Placement listing, one line per copy: index, perm, signs, translation."""
    lines = []
    for k, h in enumerate(patch.placements):
        perm = ",".join(str(p) for p in h.matrix.perm)
        signs = ",".join(str(sg) for sg in h.matrix.signs)
        v = ",".join(str(c) for c in h.translation)
        lines.append(f"{k}\tperm={perm}\tsigns={signs}\tv={v}")
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
