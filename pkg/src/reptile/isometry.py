"""Exact integer isometries of the lattice Z^d (d = 2 or 3).

An isometry is x -> M x + v where v is an integer vector and M is a signed
permutation matrix: exactly one entry +1 or -1 in each row and each column.
These are precisely the isometries mapping Z^d onto itself; the matrices
alone form the symmetry group of the cube [-1,1]^d (8 elements for d = 2,
48 for d = 3).

Everything here is immutable and hashable, so values can be shared freely
between workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import DimensionError

SUPPORTED_DIMS = (2, 3)

IntVec = tuple[int, ...]


def _check_dims_match(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


@dataclass(frozen=True, slots=True)
class SignedPermMatrix:
    """Signed permutation matrix, encoded column-wise.

    Column j of the matrix is signs[j] * e_perm[j], i.e. the matrix maps
    e_j to signs[j] * e_perm[j].  The encoding makes the one-nonzero-per-
    row-and-column invariant hold by construction; dense input must go
    through :meth:`from_rows`, which validates.
    """

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        d = len(self.perm)
        if len(self.signs) != d:
            raise ValueError("perm and signs must have equal length")
        if sorted(self.perm) != list(range(d)):
            raise ValueError(f"perm {self.perm!r} is not a permutation of 0..{d - 1}")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signs {self.signs!r} must be +1 or -1")

    @property
    def dim(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, dim: int) -> "SignedPermMatrix":
        return cls(tuple(range(dim)), (1,) * dim)

    @classmethod
    def from_rows(cls, rows) -> "SignedPermMatrix":
        """Build from a dense integer matrix, validating the shape."""
        d = len(rows)
        perm = [-1] * d
        signs = [0] * d
        for i, row in enumerate(rows):
            if len(row) != d:
                raise ValueError("matrix is not square")
            for j, entry in enumerate(row):
                if entry == 0:
                    continue
                if entry not in (1, -1) or perm[j] != -1:
                    raise ValueError("matrix is not a signed permutation matrix")
                perm[j] = i
                signs[j] = entry
        if -1 in perm:
            raise ValueError("matrix has a zero column")
        return cls(tuple(perm), tuple(signs))

    def rows(self) -> tuple[tuple[int, ...], ...]:
        """Dense representation, row-major."""
        d = self.dim
        out = [[0] * d for _ in range(d)]
        for j in range(d):
            out[self.perm[j]][j] = self.signs[j]
        return tuple(tuple(r) for r in out)

    def apply(self, x: IntVec) -> IntVec:
        _check_dims_match(self.dim, len(x))
        y = [0] * self.dim
        for j, xj in enumerate(x):
            y[self.perm[j]] = self.signs[j] * xj
        return tuple(y)

    def compose(self, other: "SignedPermMatrix") -> "SignedPermMatrix":
        """Matrix product self @ other."""
        _check_dims_match(self.dim, other.dim)
        perm = tuple(self.perm[p] for p in other.perm)
        signs = tuple(self.signs[p] * s for p, s in zip(other.perm, other.signs))
        return SignedPermMatrix(perm, signs)

    def inverse(self) -> "SignedPermMatrix":
        d = self.dim
        perm = [0] * d
        signs = [0] * d
        for j in range(d):
            perm[self.perm[j]] = j
            signs[self.perm[j]] = self.signs[j]
        return SignedPermMatrix(tuple(perm), tuple(signs))

    def det(self) -> int:
        sign = 1
        seen = [False] * self.dim
        for start in range(self.dim):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = self.perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        for s in self.signs:
            sign *= s
        return sign

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.dim)) and all(s == 1 for s in self.signs)

    def sort_key(self):
        # +1 sorts before -1, so the identity is first overall.
        return (self.perm, tuple(0 if s == 1 else 1 for s in self.signs))


@lru_cache(maxsize=None)
def _enumerate_matrices(dim: int) -> tuple[SignedPermMatrix, ...]:
    mats = [
        SignedPermMatrix(perm, signs)
        for perm in itertools.permutations(range(dim))
        for signs in itertools.product((1, -1), repeat=dim)
    ]
    mats.sort(key=SignedPermMatrix.sort_key)
    return tuple(mats)


def enumerate_matrices(dim: int) -> list[SignedPermMatrix]:
    """All signed permutation matrices of the given dimension.

    Canonical order: lexicographic on (perm, signs) with +1 before -1,
    so the identity comes first.  There are 2^d * d! of them: 8 for d = 2
    and 48 for d = 3.
    """
    if dim not in SUPPORTED_DIMS:
        raise DimensionError(f"unsupported dimension {dim}; expected one of {SUPPORTED_DIMS}")
    return list(_enumerate_matrices(dim))


@dataclass(frozen=True, slots=True)
class LatticeIsometry:
    """Affine map x -> M x + v with M a signed permutation and v integer."""

    matrix: SignedPermMatrix
    translation: IntVec

    def __post_init__(self):
        _check_dims_match(self.matrix.dim, len(self.translation))
        if any(not isinstance(c, int) for c in self.translation):
            raise ValueError("translation coordinates must be integers")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @classmethod
    def identity(cls, dim: int) -> "LatticeIsometry":
        return cls(SignedPermMatrix.identity(dim), (0,) * dim)

    @classmethod
    def from_translation(cls, v: IntVec) -> "LatticeIsometry":
        return cls(SignedPermMatrix.identity(len(v)), tuple(v))

    def __call__(self, x: IntVec) -> IntVec:
        return apply(self, x)

    def compose(self, other: "LatticeIsometry") -> "LatticeIsometry":
        return compose(self, other)

    def inverse(self) -> "LatticeIsometry":
        return inverse(self)

    def is_identity(self) -> bool:
        return is_identity(self)

    def is_translation(self) -> bool:
        return self.matrix.is_identity()

    def sort_key(self):
        return (*self.matrix.sort_key(), self.translation)


def apply(h: LatticeIsometry, x: IntVec) -> IntVec:
    """Evaluate h at the integer point x: M x + v, exactly."""
    mx = h.matrix.apply(tuple(x))
    return tuple(a + b for a, b in zip(mx, h.translation))


def compose(a: LatticeIsometry, b: LatticeIsometry) -> LatticeIsometry:
    """The map x -> a(b(x)): matrix M_a M_b, translation M_a v_b + v_a."""
    _check_dims_match(a.dim, b.dim)
    m = a.matrix.compose(b.matrix)
    t = tuple(p + q for p, q in zip(a.matrix.apply(b.translation), a.translation))
    return LatticeIsometry(m, t)


def inverse(h: LatticeIsometry) -> LatticeIsometry:
    """The integer isometry undoing h: x -> M^-1 x - M^-1 v."""
    minv = h.matrix.inverse()
    t = tuple(-c for c in minv.apply(h.translation))
    return LatticeIsometry(minv, t)


def is_identity(h: LatticeIsometry) -> bool:
    return h.matrix.is_identity() and all(c == 0 for c in h.translation)


def sup_norm(v: IntVec) -> int:
    return max(abs(c) for c in v)


# ---------------------------------------------------------------------------
# Compiled group tables.
#
# The neighbor recursion and the random search compose millions of isometries;
# representing an isometry there as (matrix index, translation tuple) and
# composing matrices by table lookup is an order of magnitude faster than
# going through the dataclasses. The tables are private to the package.
# ---------------------------------------------------------------------------


class GroupTables:
    """Composition/inverse tables for the signed permutation group of one dim."""

    __slots__ = ("dim", "matrices", "index", "compose", "inverse", "_rowmaps")

    def __init__(self, dim: int):
        mats = enumerate_matrices(dim)
        n = len(mats)
        self.dim = dim
        self.matrices = tuple(mats)
        self.index = {(m.perm, m.signs): i for i, m in enumerate(mats)}
        self.compose = tuple(
            tuple(self.index[(c.perm, c.signs)] for c in (a.compose(b) for b in mats))
            for a in mats
        )
        self.inverse = tuple(
            self.index[(m.inverse().perm, m.inverse().signs)] for m in mats
        )
        # Row-wise action: y[r] = sign[r] * x[src[r]] avoids building y out of order.
        rowmaps = []
        for m in mats:
            inv = m.inverse()
            src = inv.perm
            sgn = tuple(m.signs[src[r]] for r in range(dim))
            rowmaps.append((src, sgn))
        self._rowmaps = tuple(rowmaps)

    def act(self, mat_idx: int, x: IntVec) -> IntVec:
        src, sgn = self._rowmaps[mat_idx]
        return tuple(sgn[r] * x[src[r]] for r in range(self.dim))

    def matrix_index(self, m: SignedPermMatrix) -> int:
        return self.index[(m.perm, m.signs)]


@lru_cache(maxsize=None)
def group_tables(dim: int) -> GroupTables:
    return GroupTables(dim)
