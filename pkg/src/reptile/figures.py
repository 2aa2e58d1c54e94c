"""Matplotlib renderings of tiles and tilings for the report workflow.

These are inspection aids, not canonical exports: the byte-deterministic
formats live in :mod:`reptile.export`.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from .export import PALETTE, supertile_patch
from .isometry import LatticeIsometry
from .system import RepTileSystem
from .topology import VoxelSet, transform_cells, voxelize


def _copies(s: RepTileSystem, tile: VoxelSet, level: int) -> list[frozenset]:
    patch = supertile_patch(s, level)
    out = []
    for h in patch.placements:
        placed = LatticeIsometry(
            h.matrix, tuple(c * 2**tile.level for c in h.translation)
        )
        out.append(transform_cells(placed, tile.cells))
    return out


def _index_grid(copies: list[frozenset]) -> tuple[np.ndarray, tuple[int, ...]]:
    cells = [c for copy in copies for c in copy]
    arr = np.array(sorted(cells), dtype=np.int64)
    lo = arr.min(axis=0)
    shape = arr.max(axis=0) - lo + 1
    grid = np.full(tuple(shape), -1, dtype=np.int32)
    for k, copy in enumerate(copies):
        for c in copy:
            grid[tuple(np.array(c) - lo)] = k % len(PALETTE)
    return grid, tuple(int(x) for x in lo)


def render_tile_figure(
    s: RepTileSystem,
    out_path,
    is_rep_tile: bool = False,
    level: int = 2,
    title: str | None = None,
) -> Path:
    """Render one PNG: a colored supertile patch for verified tiles, a plain
    outer approximation otherwise.  Returns the written path."""
    out_path = Path(out_path)
    tile = voxelize(s, min(level, 4))
    if is_rep_tile:
        copies = _copies(s, tile, min(level, 2) if s.dim == 3 else level)
    else:
        copies = [tile.cells]

    fig = plt.figure(figsize=(6, 6))
    if s.dim == 2:
        grid, lo = _index_grid(copies)
        masked = np.ma.masked_less(grid, 0)
        ax = fig.add_subplot(111)
        ax.imshow(
            masked.T,
            origin="lower",
            cmap=ListedColormap(PALETTE),
            vmin=0,
            vmax=len(PALETTE) - 1,
            extent=(lo[0], lo[0] + grid.shape[0], lo[1], lo[1] + grid.shape[1]),
            interpolation="none",
        )
        ax.set_aspect("equal")
    else:
        grid, _ = _index_grid(copies)
        ax = fig.add_subplot(111, projection="3d")
        filled = grid >= 0
        colors = np.empty(grid.shape, dtype=object)
        for k in range(len(PALETTE)):
            colors[grid == k] = PALETTE[k]
        ax.voxels(filled, facecolors=colors, edgecolor="#333333", linewidth=0.2)
        ax.set_box_aspect(grid.shape)
    if title:
        ax.set_title(title)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path
