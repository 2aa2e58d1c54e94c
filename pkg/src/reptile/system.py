"""Rep-tile systems: the defining data, word maps, counting, and the file format.

A system is the data of the set equation  2A = h_1(A) u ... u h_m(A)  where
the h_k are lattice isometries and m = 2^d.  The expansion is hard-coded to
x -> 2x, which is what fixes the piece count at 2^d.  The attractor A is the
unique compact solution; whether it is a genuine rep-tile (pieces with
disjoint interiors) is decided in :mod:`reptile.neighbors`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DimensionError, ParseError, ValidationError
from .isometry import (
    IntVec,
    LatticeIsometry,
    SignedPermMatrix,
    compose,
    enumerate_matrices,
    sup_norm,
)

Word = tuple[int, ...]  # piece addresses, 0-based, most significant letter first


@dataclass(frozen=True, slots=True)
class RepTileSystem:
    """The m = 2^d maps h_k of one subdivision; immutable."""

    maps: tuple[LatticeIsometry, ...]

    def __post_init__(self):
        if not self.maps:
            raise ValidationError("system needs at least one map", field="maps")
        dim = self.maps[0].dim
        if dim not in (2, 3):
            raise DimensionError(f"unsupported dimension {dim}")
        if any(h.dim != dim for h in self.maps):
            raise ValidationError("all maps must share one dimension", field="maps")
        if len(self.maps) != 2**dim:
            raise ValidationError(
                f"expected {2**dim} maps for dim {dim}, got {len(self.maps)}",
                field="maps",
            )

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def m(self) -> int:
        return len(self.maps)


@dataclass(frozen=True, slots=True)
class BlockSystem:
    """Four isometries generating an 8-map system by repeated halving.

    The tile doubles to two congruent blocks C and f1(C); C is two blocks
    D and f2(D); D is two tile copies f3(A) and f4(A).
    """

    f1: LatticeIsometry
    f2: LatticeIsometry
    f3: LatticeIsometry
    f4: LatticeIsometry

    def __post_init__(self):
        for name in ("f1", "f2", "f3", "f4"):
            if getattr(self, name).dim != 3:
                raise ValidationError("block maps must have dimension 3", field=name)


def block_expand(b: BlockSystem) -> RepTileSystem:
    """Expand the four block maps into the full 8-map system.

    Substituting the three halving equations into each other yields the
    eight pieces in this fixed order:
    f3, f4, f2 f3, f2 f4, f1 f3, f1 f4, f1 f2 f3, f1 f2 f4.
    """
    f1, f2, f3, f4 = b.f1, b.f2, b.f3, b.f4
    f12 = compose(f1, f2)
    return RepTileSystem(
        (
            f3,
            f4,
            compose(f2, f3),
            compose(f2, f4),
            compose(f1, f3),
            compose(f1, f4),
            compose(f12, f3),
            compose(f12, f4),
        )
    )


def g_conjugate(h: LatticeIsometry, power: int = 1) -> LatticeIsometry:
    """Conjugate by the expansion: g^k h g^-k keeps M and scales v by 2^k."""
    scale = 2**power
    return LatticeIsometry(h.matrix, tuple(scale * c for c in h.translation))


def word_map(s: RepTileSystem, w: Word) -> LatticeIsometry:
    """Placement of the piece addressed by w inside the level-|w| supertile.

    With piece maps f_k = g^-1 h_k, the word map is
    H_w = g^n f_w1 ... f_wn  (n = |w|, first letter = coarsest subdivision).
    It is an integer isometry: appending a letter k satisfies
    H_(w k) = (g H_w g^-1) o h_k, which is the recursion used here.
    Closed form: M_w = M_w1 ... M_wn and
    v_w = sum_i 2^(n-i) M_w1 ... M_w(i-1) v_wi.
    """
    if not w:
        raise ValueError("word must be nonempty")
    if any(k < 0 or k >= s.m for k in w):
        raise ValueError(f"word letters must be in 0..{s.m - 1}")
    h = s.maps[w[0]]
    for k in w[1:]:
        h = compose(g_conjugate(h), s.maps[k])
    return h


def bounding_radius(s: RepTileSystem) -> int:
    """R such that the attractor lies in the sup-norm ball [-R, R]^d.

    R = max(1, max_k |v_k|_inf) works because each piece map f_k sends
    [-R, R]^d into itself: |   (M x + v) / 2 |_inf <= (R + R) / 2 = R.
    The floor of 1 avoids a degenerate zero-radius ball.
    """
    return max(1, max(sup_norm(h.translation) for h in s.maps))


def data_space_count(dim: int, range_: int, num_maps: int) -> int:
    """Exact size of the random-search data space.

    Each map is one of |matrices(dim)| * (2*range+1)^dim choices; num_maps
    maps are drawn independently.
    """
    if range_ < 0:
        raise ValueError("range must be >= 0")
    if num_maps < 1:
        raise ValueError("num_maps must be >= 1")
    per_map = len(enumerate_matrices(dim)) * (2 * range_ + 1) ** dim
    return per_map**num_maps


# ---------------------------------------------------------------------------
# File format: one JSON document per file, canonical field order, no floats.
#
#   {"kind": "system", "dim": 2, "maps": [{"perm": [...], "signs": [...],
#    "v": [...]}, ...]}
#   {"kind": "block", "dim": 3, "f1": {...}, ..., "f4": {...}}
#
# Unknown fields are rejected so that typos fail loudly rather than being
# silently ignored in archived tiles.
# ---------------------------------------------------------------------------

_MAP_FIELDS = ("perm", "signs", "v")


def _map_to_obj(h: LatticeIsometry) -> dict:
    return {
        "perm": list(h.matrix.perm),
        "signs": list(h.matrix.signs),
        "v": list(h.translation),
    }


def _int_list(value, field: str, length: int) -> list[int]:
    if not isinstance(value, list) or any(
        not isinstance(c, int) or isinstance(c, bool) for c in value
    ):
        raise ValidationError("expected a list of integers", field=field)
    if len(value) != length:
        raise ValidationError(f"expected {length} entries, got {len(value)}", field=field)
    return value


def _map_from_obj(obj, dim: int, field: str) -> LatticeIsometry:
    if not isinstance(obj, dict):
        raise ValidationError("expected a map record", field=field)
    unknown = set(obj) - set(_MAP_FIELDS)
    if unknown:
        raise ValidationError(f"unknown fields {sorted(unknown)}", field=field)
    for key in _MAP_FIELDS:
        if key not in obj:
            raise ValidationError(f"missing field {key!r}", field=field)
    perm = _int_list(obj["perm"], f"{field}.perm", dim)
    signs = _int_list(obj["signs"], f"{field}.signs", dim)
    v = _int_list(obj["v"], f"{field}.v", dim)
    try:
        matrix = SignedPermMatrix(tuple(perm), tuple(signs))
    except ValueError as exc:
        raise ValidationError(str(exc), field=field) from None
    return LatticeIsometry(matrix, tuple(v))


def emit_system(s: RepTileSystem | BlockSystem) -> bytes:
    """Canonical UTF-8 serialization; byte-identical for equal systems."""
    if isinstance(s, RepTileSystem):
        doc = {
            "kind": "system",
            "dim": s.dim,
            "maps": [_map_to_obj(h) for h in s.maps],
        }
    elif isinstance(s, BlockSystem):
        doc = {
            "kind": "block",
            "dim": 3,
            "f1": _map_to_obj(s.f1),
            "f2": _map_to_obj(s.f2),
            "f3": _map_to_obj(s.f3),
            "f4": _map_to_obj(s.f4),
        }
    else:
        raise TypeError(f"cannot emit {type(s).__name__}")
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def system_from_document(doc) -> RepTileSystem | BlockSystem:
    """Validate a decoded document and build the system it describes."""
    if not isinstance(doc, dict):
        raise ValidationError("document must be an object")
    kind = doc.get("kind")
    if kind not in ("system", "block"):
        raise ValidationError(f"unknown kind {kind!r}", field="kind")
    dim = doc.get("dim")
    if dim not in (2, 3):
        raise ValidationError(f"dim must be 2 or 3, got {dim!r}", field="dim")

    if kind == "system":
        unknown = set(doc) - {"kind", "dim", "maps"}
        if unknown:
            raise ValidationError(f"unknown fields {sorted(unknown)}")
        maps = doc.get("maps")
        if not isinstance(maps, list):
            raise ValidationError("expected a list of map records", field="maps")
        if len(maps) != 2**dim:
            raise ValidationError(
                f"expected {2**dim} maps for dim {dim}, got {len(maps)}", field="maps"
            )
        return RepTileSystem(
            tuple(_map_from_obj(obj, dim, f"maps[{i}]") for i, obj in enumerate(maps))
        )

    if dim != 3:
        raise ValidationError("block systems require dim 3", field="dim")
    unknown = set(doc) - {"kind", "dim", "f1", "f2", "f3", "f4"}
    if unknown:
        raise ValidationError(f"unknown fields {sorted(unknown)}")
    parts = {}
    for name in ("f1", "f2", "f3", "f4"):
        if name not in doc:
            raise ValidationError("missing block map", field=name)
        parts[name] = _map_from_obj(doc[name], 3, name)
    return BlockSystem(**parts)


def system_to_document(s: RepTileSystem | BlockSystem) -> dict:
    return json.loads(emit_system(s).decode("utf-8"))


def parse_system(text: str | bytes) -> RepTileSystem | BlockSystem:
    """Parse one system document; inverse of :func:`emit_system`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return system_from_document(doc)


def load_system(path, expand_blocks: bool = True) -> RepTileSystem | BlockSystem:
    """Read a system file; block documents are expanded unless told otherwise."""
    s = parse_system(Path(path).read_bytes())
    if expand_blocks and isinstance(s, BlockSystem):
        return block_expand(s)
    return s


def save_system(s: RepTileSystem | BlockSystem, path) -> None:
    Path(path).write_bytes(emit_system(s))
